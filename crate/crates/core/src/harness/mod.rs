//! Monte Carlo BER experiments.
//!
//! A burst is one training block followed by `n_data` data symbols. Every
//! random draw of a burst (carrier phase, payload, noise) comes from a
//! stream keyed by `(master_seed, snr index, burst index, role)`, and every
//! receiver of an experiment sees the same bursts, so curves are paired.
//! Multipath bursts cycle through the channel realizations in order.

mod config;
mod engine;
mod registry;
mod results;

pub use config::{grid, preset, ChannelKind, Coding, ExperimentConfig, PhaseMode, PRESETS};
pub use engine::{channel_references, run_experiment, run_experiment_with};
pub use registry::{ReceiverId, ReceiverSpec, TrainingKind};
pub use results::{
    curve, emit_plot_script, read_results, snr_at_ber, write_results, write_results_file, BerRecord, CSV_HEADER,
};
