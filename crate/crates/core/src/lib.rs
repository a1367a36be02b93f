//! Monobit digital receivers for QPSK.
//!
//! The crate models a direct-conversion receiver whose I and Q branches are
//! sampled at the Nyquist rate by 1-bit comparators. It provides the
//! optimal (maximum-likelihood) detector, the linear Taylor-expansion
//! combiner with training-based weight estimation, receivers robust to IQ
//! imbalance (double training, combinational weights), the 8-sector phase
//! quantization receiver, bit LLRs for a convolutional decoder, closed-form
//! deflection ratios, and a deterministic Monte Carlo BER harness.
//!
//! Pipeline, in module order:
//!
//! * [`waveform`] builds the sampled reference response `p_ref(lT)`.
//! * [`channel`] draws multipath realizations, carrier phases and noise.
//! * [`frontend`] applies IQ imbalance and quantizes.
//! * [`receivers`] turns frames into symbol decisions.
//! * [`coding`] maps symbol log-likelihoods to bit LLRs and decodes.
//! * [`analytics`] predicts performance in closed form.
//! * [`harness`] runs BER experiments and writes CSV.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytics;
pub mod channel;
pub mod coding;
mod error;
pub mod frontend;
pub mod harness;
pub mod receivers;
pub mod rng;
pub mod symbol;
pub mod waveform;

pub use error::{Error, Result};
pub use symbol::SymbolPair;
