use std::cell::OnceCell;

use rand::Rng;

use std::f64::consts::TAU;

use crate::channel::{
    awgn_channel, dense_multipath, fixed_phase, load_channel_file, sparse_multipath, PhaseDifference,
};
use crate::coding::{conv_encode, hard_decode, llr_exact, llr_maxlog, soft_decode, LlrMode};
use crate::frontend::{synthesize_burst, AnalogFrame, QuantizedFrame};
use crate::receivers::{
    argmax, chip_error_probs, combinational_weights, cw_llf, iterate_with, linear_llf, matched_filter_double_weights,
    matched_filter_weights, suboptimal_llf, true_sign_factors, CombinationalModel, DoubleTrainingModel,
    IterationConfig, Llf, MlDetector, PhaseQuadModel, TaylorModel, TrainedModel,
};
use crate::rng::{self, StreamRole};
use crate::symbol::{SymbolPair, HYPOTHESES};
use crate::waveform::{build_reference, scale_to_snr, ReferenceWaveform};
use crate::{Error, Result};

use super::config::{ChannelKind, Coding, ExperimentConfig, PhaseMode};
use super::registry::{ReceiverId, ReceiverSpec, TrainingKind};
use super::results::BerRecord;

/// Bursts evaluated per scheduling round. Early stopping is decided burst by
/// burst in index order after each round, so results do not depend on the
/// number of worker threads.
const BATCH: u64 = 16;

/// Carrier phase of a burst under [`PhaseMode::Random`]: a randomly shifted
/// golden-ratio sequence. Each phase is uniform on `[0, 2 pi)`, and
/// consecutive bursts cover the circle evenly, which keeps the phase average
/// of a BER point stable with few bursts.
fn burst_phase(offset: f64, burst: u64) -> PhaseDifference {
    const GOLDEN: f64 = 0.618_033_988_749_894_8;
    PhaseDifference::new(TAU * (offset + burst as f64 * GOLDEN).fract())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    bursts: u64,
    bits: u64,
    errors: u64,
}

/// Noise-normalized reference of every channel realization, before SNR scaling.
pub fn channel_references(config: &ExperimentConfig) -> Result<Vec<ReferenceWaveform>> {
    let build = |ch| build_reference(&config.pulse, &ch, config.window, config.bandwidth_hz, 1.0);
    let seed = |r: usize| rng::derive_seed(config.master_seed, &[r as u64, StreamRole::Channel as u64]);
    let wrap = |r: usize, e: Error| Error::Trial {
        snr_db: f64::NAN,
        realization: r,
        source: Box::new(e),
    };
    match &config.channel {
        ChannelKind::Awgn => Ok(vec![build(awgn_channel())?]),
        ChannelKind::File(path) => Ok(vec![build(load_channel_file(path)?)?]),
        ChannelKind::Dense(p) => par_map(0..config.realizations as u64, |r| {
            dense_multipath(seed(r as usize), p)
                .and_then(build)
                .map_err(|e| wrap(r as usize, e))
        })
        .into_iter()
        .collect(),
        ChannelKind::Sparse(p) => par_map(0..config.realizations as u64, |r| {
            sparse_multipath(seed(r as usize), p)
                .and_then(build)
                .map_err(|e| wrap(r as usize, e))
        })
        .into_iter()
        .collect(),
    }
}

#[cfg(feature = "parallel")]
fn par_map<T: Send, F: Fn(u64) -> T + Sync + Send>(range: std::ops::Range<u64>, f: F) -> Vec<T> {
    use rayon::prelude::*;
    range.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, F: Fn(u64) -> T>(range: std::ops::Range<u64>, f: F) -> Vec<T> {
    range.map(f).collect()
}

/// Runs every receiver over the SNR grid and returns one record per
/// (receiver, SNR) pair, receiver-major.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<BerRecord>> {
    run_experiment_with(config, |_| {})
}

/// As [`run_experiment`], calling `on_point` with the records of each SNR
/// point as soon as it completes.
pub fn run_experiment_with<F: FnMut(&[BerRecord])>(
    config: &ExperimentConfig,
    mut on_point: F,
) -> Result<Vec<BerRecord>> {
    config.validate()?;
    let references = channel_references(config)?;
    let n_rx = config.receivers.len();
    let min_bursts = config.min_bursts();
    let mut per_snr = Vec::with_capacity(config.snr_grid.len());

    for (snr_idx, &snr_db) in config.snr_grid.iter().enumerate() {
        let scaled = references
            .iter()
            .map(|r| scale_to_snr(r, snr_db))
            .collect::<Result<Vec<_>>>()?;
        let phase_offset: f64 = rng::stream(config.master_seed, &[snr_idx as u64], StreamRole::Phase).random();
        let mut tallies = vec![Tally::default(); n_rx];
        let mut done = vec![false; n_rx];
        let mut next = 0u64;
        while done.iter().any(|d| !d) {
            let active: Vec<usize> = (0..n_rx).filter(|&k| !done[k]).collect();
            let round = par_map(next..next + BATCH, |b| {
                run_burst(config, &scaled, snr_idx, phase_offset, b, &active)
            });
            for (offset, outcome) in round.into_iter().enumerate() {
                let burst = next + offset as u64;
                let counts = outcome.map_err(|e| Error::Trial {
                    snr_db,
                    realization: (burst % scaled.len() as u64) as usize,
                    source: Box::new(e),
                })?;
                for (j, &k) in active.iter().enumerate() {
                    if done[k] {
                        continue;
                    }
                    let t = &mut tallies[k];
                    t.bursts += 1;
                    t.bits += counts[j].0;
                    t.errors += counts[j].1;
                    done[k] =
                        t.bits >= config.max_bits || (t.errors >= config.min_bit_errors && t.bursts >= min_bursts);
                }
            }
            next += BATCH;
        }
        let point: Vec<BerRecord> = config
            .receivers
            .iter()
            .zip(&tallies)
            .map(|(spec, t)| {
                BerRecord::new(
                    spec.to_string(),
                    config.channel.label(),
                    snr_db,
                    t.bits,
                    t.errors,
                    config.master_seed,
                )
            })
            .collect();
        on_point(&point);
        per_snr.push(point);
    }
    Ok((0..n_rx)
        .flat_map(|k| per_snr.iter().map(move |p| p[k].clone()))
        .collect())
}

struct Payload {
    symbols: Vec<SymbolPair>,
    info_bits: Vec<u8>,
}

fn draw_payload<R: Rng>(config: &ExperimentConfig, rng: &mut R) -> Payload {
    match config.coding {
        Coding::None => {
            let symbols: Vec<SymbolPair> = (0..config.n_data).map(|_| HYPOTHESES[rng.random_range(0..4)]).collect();
            let info_bits = symbols
                .iter()
                .flat_map(|s| [u8::from(s.d1 < 0), u8::from(s.d0 < 0)])
                .collect();
            Payload { symbols, info_bits }
        }
        Coding::ConvR12 => {
            let info_bits: Vec<u8> = (0..config.info_bits_per_burst())
                .map(|_| rng.random_range(0..2))
                .collect();
            let code = conv_encode(&info_bits);
            let symbols = code
                .chunks_exact(2)
                .map(|c| SymbolPair::from_bits(c[0], c[1]))
                .collect();
            Payload { symbols, info_bits }
        }
    }
}

/// Frames of one burst at one carrier phase, quantized on demand.
struct PhaseFrames<'a> {
    config: &'a ExperimentConfig,
    reference: &'a ReferenceWaveform,
    phi: PhaseDifference,
    stream: [u64; 2],
    data: Vec<AnalogFrame>,
    data_mono: OnceCell<Vec<QuantizedFrame>>,
    data_pq: OnceCell<Vec<QuantizedFrame>>,
    single: OnceCell<Vec<AnalogFrame>>,
    double: OnceCell<Vec<AnalogFrame>>,
}

fn training_symbols(kind: TrainingKind, n_t: usize) -> Vec<SymbolPair> {
    match kind {
        TrainingKind::None => Vec::new(),
        TrainingKind::Single => vec![SymbolPair::REFERENCE; n_t],
        TrainingKind::Double => {
            let mut s = vec![SymbolPair::REFERENCE; n_t / 2];
            s.resize(n_t, SymbolPair::QUADRATURE);
            s
        }
    }
}

impl<'a> PhaseFrames<'a> {
    fn new(
        config: &'a ExperimentConfig,
        reference: &'a ReferenceWaveform,
        phi: PhaseDifference,
        stream: [u64; 2],
        payload: &Payload,
    ) -> Self {
        let mut noise = rng::stream(config.master_seed, &[stream[0], stream[1], 0], StreamRole::Noise);
        let data = synthesize_burst(reference, &payload.symbols, phi, &config.imbalance, &mut noise);
        Self {
            config,
            reference,
            phi,
            stream,
            data,
            data_mono: OnceCell::new(),
            data_pq: OnceCell::new(),
            single: OnceCell::new(),
            double: OnceCell::new(),
        }
    }

    fn training(&self, kind: TrainingKind) -> &[AnalogFrame] {
        let (cell, tag) = match kind {
            TrainingKind::Double => (&self.double, 2),
            _ => (&self.single, 1),
        };
        cell.get_or_init(|| {
            let mut noise = rng::stream(
                self.config.master_seed,
                &[self.stream[0], self.stream[1], tag],
                StreamRole::Noise,
            );
            let symbols = training_symbols(kind, self.config.n_training);
            synthesize_burst(self.reference, &symbols, self.phi, &self.config.imbalance, &mut noise)
        })
    }

    fn mono(&self) -> &[QuantizedFrame] {
        self.data_mono
            .get_or_init(|| self.data.iter().map(AnalogFrame::monobit).collect())
    }

    fn pq(&self) -> &[QuantizedFrame] {
        self.data_pq
            .get_or_init(|| self.data.iter().map(AnalogFrame::phase8).collect())
    }
}

fn trained<M: TrainedModel>(
    frames: &PhaseFrames,
    kind: TrainingKind,
    phase8: bool,
    data: &[QuantizedFrame],
    iteration: IterationConfig,
) -> Result<Vec<Llf>> {
    let quantize = if phase8 {
        AnalogFrame::phase8
    } else {
        AnalogFrame::monobit
    };
    let training: Vec<QuantizedFrame> = frames.training(kind).iter().map(quantize).collect();
    let symbols = training_symbols(kind, frames.config.n_training);
    let out = iterate_with::<M>(&training, &symbols, data, iteration)?;
    Ok(out.decisions.into_iter().map(|d| d.llf_values).collect())
}

/// Symbol log-likelihoods of every data frame under receiver `id`.
fn detect(id: ReceiverId, frames: &PhaseFrames) -> Result<Vec<Llf>> {
    let config = frames.config;
    let (reference, phi) = (frames.reference, frames.phi);
    let theta = config.imbalance.theta;
    let iteration = if id.refines() {
        config.iteration
    } else {
        IterationConfig::ONE_SHOT
    };
    use ReceiverId::*;
    Ok(match id {
        FrFMf => {
            let w = matched_filter_weights(reference, phi)?;
            frames.data.iter().map(|f| linear_llf(&f.i, &f.q, &w)).collect()
        }
        MbFMl => {
            let det = MlDetector::new(&chip_error_probs(reference, phi));
            frames.mono().iter().map(|f| det.llf(f)).collect()
        }
        MbFMf => {
            let w = matched_filter_weights(reference, phi)?;
            frames.mono().iter().map(|f| suboptimal_llf(f, &w)).collect()
        }
        MbFMfSi => {
            let dw = matched_filter_double_weights(reference, phi, theta)?;
            let sf = true_sign_factors(phi, theta);
            let cw = combinational_weights(&dw, sf);
            frames.mono().iter().map(|f| cw_llf(f, &cw, sf)).collect()
        }
        MbETe | MbETeIr => trained::<TaylorModel>(frames, TrainingKind::Single, false, frames.mono(), iteration)?,
        MbEDt | MbEDtIr => {
            trained::<DoubleTrainingModel>(frames, TrainingKind::Double, false, frames.mono(), iteration)?
        }
        MbECw | MbECwIr => {
            trained::<CombinationalModel>(frames, TrainingKind::Double, false, frames.mono(), iteration)?
        }
        PqETe | PqETeIr => trained::<PhaseQuadModel>(frames, TrainingKind::Single, true, frames.pq(), iteration)?,
    })
}

/// `(bits, errors)` of one receiver on one burst.
fn count_errors(config: &ExperimentConfig, spec: &ReceiverSpec, payload: &Payload, llfs: &[Llf]) -> Result<(u64, u64)> {
    let decided = || llfs.iter().map(|v| HYPOTHESES[argmax(v)]);
    let errors = match config.coding {
        Coding::None => decided()
            .zip(&payload.symbols)
            .map(|(d, s)| u64::from(d.bit_errors(*s)))
            .sum(),
        Coding::ConvR12 => {
            let decoded = match spec.llr.unwrap_or(config.llr) {
                LlrMode::Hard => hard_decode(&decided().flat_map(|d| [d.d1, d.d0]).collect::<Vec<_>>())?,
                mode => {
                    let llr = if mode == LlrMode::Exact { llr_exact } else { llr_maxlog };
                    let soft: Vec<f64> = llfs
                        .iter()
                        .flat_map(|v| {
                            let b = llr(v);
                            [b.llr1, b.llr0]
                        })
                        .collect();
                    soft_decode(&soft)?
                }
            };
            decoded.iter().zip(&payload.info_bits).filter(|(a, b)| a != b).count() as u64
        }
    };
    Ok((payload.info_bits.len() as u64, errors))
}

fn run_burst(
    config: &ExperimentConfig,
    references: &[ReferenceWaveform],
    snr_idx: usize,
    phase_offset: f64,
    burst: u64,
    active: &[usize],
) -> Result<Vec<(u64, u64)>> {
    let stream = [snr_idx as u64, burst];
    let reference = &references[(burst % references.len() as u64) as usize];
    let default_phi = match config.phase_mode {
        PhaseMode::Random => burst_phase(phase_offset, burst),
        PhaseMode::Fixed(deg) => fixed_phase(deg),
    };
    let payload = draw_payload(config, &mut rng::stream(config.master_seed, &stream, StreamRole::Data));
    let mut groups: Vec<PhaseFrames> = Vec::new();
    let mut out = Vec::with_capacity(active.len());
    for &k in active {
        let spec = &config.receivers[k];
        let phi = spec.phase_deg.map_or(default_phi, fixed_phase);
        let g = match groups.iter().position(|g| g.phi == phi) {
            Some(g) => g,
            None => {
                groups.push(PhaseFrames::new(config, reference, phi, stream, &payload));
                groups.len() - 1
            }
        };
        let llfs = detect(spec.id, &groups[g])?;
        out.push(count_errors(config, spec, &payload, &llfs)?);
    }
    Ok(out)
}
