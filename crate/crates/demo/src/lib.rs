//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a flat `Float64Array`; the page slices it into rows.

use monobit::analytics::{phi_sweep, DeflectionVariant, DoubleTraining, SweepSettings};
use monobit::harness::{channel_references, run_experiment, ChannelKind, ExperimentConfig, ReceiverSpec};
use monobit::waveform::scale_to_snr;
use wasm_bindgen::prelude::*;

fn channel_kind(name: &str) -> monobit::Result<ChannelKind> {
    match name {
        "awgn" => Ok(ChannelKind::Awgn),
        "dense" => Ok(ChannelKind::Dense(Default::default())),
        "sparse" => Ok(ChannelKind::Sparse(Default::default())),
        other => Err(monobit::Error::Config(format!("unknown channel `{other}`"))),
    }
}

fn to_js(e: monobit::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Sampled reference waveform at `snr_db`. Multipath channels use the
/// realization drawn from `seed`.
pub fn reference_samples(channel: &str, seed: u64, snr_db: f64) -> monobit::Result<Vec<f64>> {
    let mut config = ExperimentConfig::with_channel(channel_kind(channel)?);
    config.master_seed = seed;
    config.realizations = 1;
    let base = channel_references(&config)?.swap_remove(0);
    Ok(scale_to_snr(&base, snr_db)?.samples)
}

#[wasm_bindgen]
pub fn reference_waveform(channel: &str, seed: u64, snr_db: f64) -> Result<Vec<f64>, JsError> {
    reference_samples(channel, seed, snr_db).map_err(to_js)
}

/// Rows of `[phi_deg, D_opt, D_sub, D_dt, D_cw]` for phi = 0..=90 degrees.
pub fn deflection_rows(snr_db: f64, theta_deg: f64, n_training: u32) -> monobit::Result<Vec<f64>> {
    let base = channel_references(&ExperimentConfig::default())?.swap_remove(0);
    let reference = scale_to_snr(&base, snr_db)?;
    let settings = SweepSettings {
        theta_deg,
        n_t_eq: f64::from(n_training),
        double: DoubleTraining::split(n_training as usize),
    };
    let phis: Vec<f64> = (0..=90).map(f64::from).collect();
    let rows = phi_sweep(&reference, &phis, &settings);
    let mut out = Vec::with_capacity(phis.len() * 5);
    for group in rows.chunks(DeflectionVariant::ALL.len()) {
        out.push(group[0].phi_deg);
        out.extend(group.iter().map(|r| r.report.d_value));
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn deflection_sweep(snr_db: f64, theta_deg: f64, n_training: u32) -> Result<Vec<f64>, JsError> {
    deflection_rows(snr_db, theta_deg, n_training).map_err(to_js)
}

/// Pairs `[snr_db, ber]` from a short AWGN run of one receiver.
pub fn ber_points(
    receiver: &str,
    snr_start: f64,
    snr_stop: f64,
    max_bits: u32,
    seed: u64,
) -> monobit::Result<Vec<f64>> {
    let spec: ReceiverSpec = receiver.parse()?;
    let config = ExperimentConfig {
        receivers: vec![spec],
        snr_grid: monobit::harness::grid(snr_start, snr_stop, 2.0),
        min_bit_errors: 100,
        max_bits: u64::from(max_bits),
        realizations: 10,
        master_seed: seed,
        ..ExperimentConfig::default()
    };
    Ok(run_experiment(&config)?
        .iter()
        .flat_map(|r| [r.snr_db, r.ber])
        .collect())
}

#[wasm_bindgen]
pub fn quick_ber(receiver: &str, snr_start: f64, snr_stop: f64, max_bits: u32, seed: u64) -> Result<Vec<f64>, JsError> {
    ber_points(receiver, snr_start, snr_stop, max_bits, seed).map_err(to_js)
}

#[wasm_bindgen]
pub fn receiver_names() -> Vec<String> {
    monobit::harness::ReceiverId::ALL
        .iter()
        .map(|r| r.name().to_string())
        .collect()
}
