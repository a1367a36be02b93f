use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::channel::{DenseProfile, SparseProfile};
use crate::coding::{LlrMode, TAIL_BITS};
use crate::frontend::ImbalanceParams;
use crate::receivers::IterationConfig;
use crate::waveform::{PulseSpec, SymbolWindow};
use crate::{Error, Result};

use super::registry::{ReceiverId, ReceiverSpec, TrainingKind};

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind {
    Awgn,
    Dense(DenseProfile),
    Sparse(SparseProfile),
    /// A single realization read from a tap file.
    File(PathBuf),
}

impl ChannelKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Awgn => "awgn",
            Self::Dense(_) => "dense",
            Self::Sparse(_) => "sparse",
            Self::File(_) => "file",
        }
    }

    pub fn is_multipath(&self) -> bool {
        matches!(self, Self::Dense(_) | Self::Sparse(_))
    }

    /// Default symbol window: centred for a single path, early peak for
    /// multipath so the delayed energy fits in the symbol.
    pub fn default_window(&self) -> SymbolWindow {
        match self {
            Self::Awgn => SymbolWindow::centered(32),
            _ => SymbolWindow {
                symbol_len: 192,
                peak_index: 8,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseMode {
    /// Uniform on `[0, 360)` degrees, redrawn per burst.
    Random,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coding {
    None,
    /// Rate-1/2, constraint length 7, generators 133/171.
    ConvR12,
}

/// Everything that defines a BER experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub receivers: Vec<ReceiverSpec>,
    pub channel: ChannelKind,
    /// `10 log10(sum p_ref^2)` in dB.
    pub snr_grid: Vec<f64>,
    pub n_training: usize,
    pub n_data: usize,
    pub imbalance: ImbalanceParams,
    pub phase_mode: PhaseMode,
    pub coding: Coding,
    /// LLR mode of receivers that do not name one.
    pub llr: LlrMode,
    pub master_seed: u64,
    pub min_bit_errors: u64,
    pub max_bits: u64,
    /// Channel realizations cycled through by the bursts (multipath only).
    pub realizations: usize,
    pub window: SymbolWindow,
    pub pulse: PulseSpec,
    pub bandwidth_hz: f64,
    /// Loop settings of the `-IR` receivers.
    pub iteration: IterationConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            receivers: vec![ReceiverId::MbETeIr.into()],
            channel: ChannelKind::Awgn,
            snr_grid: grid(0.0, 30.0, 1.0),
            n_training: 100,
            n_data: 1000,
            imbalance: ImbalanceParams::NONE,
            phase_mode: PhaseMode::Random,
            coding: Coding::None,
            llr: LlrMode::Exact,
            master_seed: 1,
            min_bit_errors: 200,
            max_bits: 2_000_000,
            realizations: 100,
            window: SymbolWindow::centered(32),
            pulse: PulseSpec::default(),
            bandwidth_hz: 5e9,
            iteration: IterationConfig::default(),
        }
    }
}

/// `start, start + step, ..` up to and including `stop`.
pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + step * k as f64).collect()
}

impl ExperimentConfig {
    /// Defaults with the given channel and its default window.
    pub fn with_channel(channel: ChannelKind) -> Self {
        Self {
            window: channel.default_window(),
            channel,
            ..Self::default()
        }
    }

    /// Number of channel realizations actually cycled through.
    pub fn effective_realizations(&self) -> usize {
        if self.channel.is_multipath() {
            self.realizations
        } else {
            1
        }
    }

    /// Bursts simulated at every SNR point before the error-count stop may
    /// apply: one per channel realization, and as many as `realizations`
    /// when each burst draws its own carrier phase.
    pub fn min_bursts(&self) -> u64 {
        if self.channel.is_multipath() || self.phase_mode == PhaseMode::Random {
            self.realizations as u64
        } else {
            1
        }
    }

    /// Information bits per burst.
    pub fn info_bits_per_burst(&self) -> usize {
        match self.coding {
            Coding::None => 2 * self.n_data,
            Coding::ConvR12 => self.n_data - TAIL_BITS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.receivers.is_empty() {
            return bad("no receivers");
        }
        if self.snr_grid.is_empty() || self.snr_grid.iter().any(|s| !s.is_finite()) {
            return bad("snr_grid must be a nonempty list of finite values");
        }
        if self.n_training == 0 {
            return bad("n_training must be at least 1");
        }
        let double = self.receivers.iter().any(|r| r.id.training() == TrainingKind::Double);
        if double && self.n_training < 2 {
            return bad("double-training receivers need n_training >= 2");
        }
        if self.n_data == 0 {
            return bad("n_data must be at least 1");
        }
        if self.coding == Coding::ConvR12 && self.n_data <= TAIL_BITS {
            return bad("coded bursts need n_data > 6");
        }
        if self.max_bits == 0 || self.realizations == 0 {
            return bad("max_bits and realizations must be positive");
        }
        if self.window.symbol_len == 0 || self.window.peak_index >= self.window.symbol_len {
            return bad("peak_index must lie inside the symbol");
        }
        if !(self.bandwidth_hz > 0.0) {
            return bad("bandwidth must be positive");
        }
        if !(0.0..1.0).contains(&self.iteration.threshold_frac) {
            return bad("prune_threshold must be in [0, 1)");
        }
        self.pulse.validate().map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses the flat key-value (TOML) form; absent keys take defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        file.into_config()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&ConfigFile::from_config(self)).expect("config is serializable")
    }
}

/// On-disk form: one key per field, no tables.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    receivers: Option<Vec<String>>,
    channel: Option<String>,
    channel_file: Option<PathBuf>,
    decay_ns: Option<f64>,
    num_taps: Option<usize>,
    spacing_ns: Option<f64>,
    num_clusters: Option<usize>,
    cluster_span_ns: Option<f64>,
    ray_rate: Option<f64>,
    snr_grid: Option<Vec<f64>>,
    n_training: Option<usize>,
    n_data: Option<usize>,
    alpha: Option<f64>,
    theta_deg: Option<f64>,
    phase: Option<String>,
    coding: Option<String>,
    llr: Option<String>,
    master_seed: Option<u64>,
    min_bit_errors: Option<u64>,
    max_bits: Option<u64>,
    realizations: Option<usize>,
    symbol_len: Option<usize>,
    peak_index: Option<usize>,
    tau_ns: Option<f64>,
    beta: Option<f64>,
    oversample: Option<usize>,
    bandwidth_ghz: Option<f64>,
    max_iter: Option<usize>,
    prune_threshold: Option<f64>,
}

fn parse_llr(s: &str) -> Result<LlrMode> {
    match s.to_ascii_lowercase().as_str() {
        "exact" | "llr-opt" => Ok(LlrMode::Exact),
        "maxlog" | "llr-sub" => Ok(LlrMode::MaxLog),
        "hard" | "llr-hard" => Ok(LlrMode::Hard),
        _ => Err(Error::Config(format!("unknown llr `{s}`"))),
    }
}

fn llr_key(m: LlrMode) -> &'static str {
    match m {
        LlrMode::Exact => "exact",
        LlrMode::MaxLog => "maxlog",
        LlrMode::Hard => "hard",
    }
}

impl ConfigFile {
    fn into_config(self) -> Result<ExperimentConfig> {
        let channel = match self.channel.as_deref().unwrap_or("awgn") {
            "awgn" => ChannelKind::Awgn,
            "dense" => {
                let d = DenseProfile::default();
                ChannelKind::Dense(DenseProfile {
                    decay_ns: self.decay_ns.unwrap_or(d.decay_ns),
                    num_taps: self.num_taps.unwrap_or(d.num_taps),
                    spacing_ns: self.spacing_ns.unwrap_or(d.spacing_ns),
                })
            }
            "sparse" => {
                let d = SparseProfile::default();
                ChannelKind::Sparse(SparseProfile {
                    num_clusters: self.num_clusters.unwrap_or(d.num_clusters),
                    cluster_span_ns: self.cluster_span_ns.unwrap_or(d.cluster_span_ns),
                    ray_rate: self.ray_rate.unwrap_or(d.ray_rate),
                })
            }
            "file" => ChannelKind::File(
                self.channel_file
                    .ok_or_else(|| Error::Config("channel = \"file\" needs channel_file".into()))?,
            ),
            other => return Err(Error::Config(format!("unknown channel `{other}`"))),
        };
        let mut c = ExperimentConfig::with_channel(channel);
        if let Some(r) = self.receivers {
            c.receivers = r.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        }
        if let Some(g) = self.snr_grid {
            c.snr_grid = g;
        }
        c.n_training = self.n_training.unwrap_or(c.n_training);
        c.n_data = self.n_data.unwrap_or(c.n_data);
        c.imbalance = ImbalanceParams::from_degrees(self.alpha.unwrap_or(0.0), self.theta_deg.unwrap_or(0.0))
            .map_err(|e| Error::Config(e.to_string()))?;
        c.phase_mode = match self.phase.as_deref() {
            None | Some("random") => PhaseMode::Random,
            Some(p) => PhaseMode::Fixed(
                p.parse()
                    .map_err(|_| Error::Config(format!("phase must be `random` or degrees, got `{p}`")))?,
            ),
        };
        c.coding = match self.coding.as_deref() {
            None | Some("none") => Coding::None,
            Some("conv_r12") => Coding::ConvR12,
            Some(other) => return Err(Error::Config(format!("unknown coding `{other}`"))),
        };
        if let Some(l) = self.llr {
            c.llr = parse_llr(&l)?;
        }
        c.master_seed = self.master_seed.unwrap_or(c.master_seed);
        c.min_bit_errors = self.min_bit_errors.unwrap_or(c.min_bit_errors);
        c.max_bits = self.max_bits.unwrap_or(c.max_bits);
        c.realizations = self.realizations.unwrap_or(c.realizations);
        if let Some(n) = self.symbol_len {
            c.window = SymbolWindow::centered(n);
        }
        if let Some(p) = self.peak_index {
            c.window.peak_index = p;
        }
        if let Some(t) = self.tau_ns {
            c.pulse.tau = t * 1e-9;
        }
        c.pulse.beta = self.beta.unwrap_or(c.pulse.beta);
        c.pulse.oversample = self.oversample.unwrap_or(c.pulse.oversample);
        if let Some(b) = self.bandwidth_ghz {
            c.bandwidth_hz = b * 1e9;
        }
        c.iteration.max_iter = self.max_iter.unwrap_or(c.iteration.max_iter);
        c.iteration.threshold_frac = self.prune_threshold.unwrap_or(c.iteration.threshold_frac);
        c.validate()?;
        Ok(c)
    }

    fn from_config(c: &ExperimentConfig) -> Self {
        let mut f = ConfigFile {
            receivers: Some(c.receivers.iter().map(|r| r.to_string()).collect()),
            channel: Some(c.channel.label().to_string()),
            snr_grid: Some(c.snr_grid.clone()),
            n_training: Some(c.n_training),
            n_data: Some(c.n_data),
            alpha: Some(c.imbalance.alpha),
            theta_deg: Some(c.imbalance.theta.to_degrees()),
            phase: Some(match c.phase_mode {
                PhaseMode::Random => "random".to_string(),
                PhaseMode::Fixed(d) => d.to_string(),
            }),
            coding: Some(
                match c.coding {
                    Coding::None => "none",
                    Coding::ConvR12 => "conv_r12",
                }
                .to_string(),
            ),
            llr: Some(llr_key(c.llr).to_string()),
            master_seed: Some(c.master_seed),
            min_bit_errors: Some(c.min_bit_errors),
            max_bits: Some(c.max_bits),
            realizations: Some(c.realizations),
            symbol_len: Some(c.window.symbol_len),
            peak_index: Some(c.window.peak_index),
            tau_ns: Some(c.pulse.tau * 1e9),
            beta: Some(c.pulse.beta),
            oversample: Some(c.pulse.oversample),
            bandwidth_ghz: Some(c.bandwidth_hz / 1e9),
            max_iter: Some(c.iteration.max_iter),
            prune_threshold: Some(c.iteration.threshold_frac),
            ..Self::default()
        };
        match &c.channel {
            ChannelKind::Awgn => {}
            ChannelKind::Dense(p) => {
                f.decay_ns = Some(p.decay_ns);
                f.num_taps = Some(p.num_taps);
                f.spacing_ns = Some(p.spacing_ns);
            }
            ChannelKind::Sparse(p) => {
                f.num_clusters = Some(p.num_clusters);
                f.cluster_span_ns = Some(p.cluster_span_ns);
                f.ray_rate = Some(p.ray_rate);
            }
            ChannelKind::File(path) => f.channel_file = Some(path.clone()),
        }
        f
    }
}

/// Identifiers accepted by [`preset`].
pub const PRESETS: [&str; 8] = [
    "fig3_awgn",
    "fig4_dense",
    "fig5_sparse",
    "fig_phase",
    "fig_coded",
    "fig7_imb_awgn",
    "fig8_imb_dense",
    "fig9_imb_sparse",
];

/// Figure parameterizations with desk-scale stopping rules.
pub fn preset(id: &str) -> Result<ExperimentConfig> {
    use ReceiverId::*;
    let specs = |ids: &[ReceiverId]| ids.iter().map(|&i| ReceiverSpec::new(i)).collect::<Vec<_>>();
    let baseline = specs(&[FrFMf, MbFMl, MbFMf, MbETe, MbETeIr, PqETeIr]);
    let imbalanced = specs(&[MbFMf, MbFMfSi, MbETeIr, MbEDtIr, MbECwIr, PqETeIr]);
    let preset_imbalance = ImbalanceParams::from_degrees(0.1, 2.5).expect("valid imbalance");
    let dense = || ChannelKind::Dense(DenseProfile::default());
    let sparse = || ChannelKind::Sparse(SparseProfile::default());
    let c = match id {
        "fig3_awgn" => ExperimentConfig {
            receivers: baseline,
            ..ExperimentConfig::default()
        },
        "fig4_dense" => ExperimentConfig {
            receivers: baseline,
            snr_grid: grid(0.0, 24.0, 2.0),
            ..ExperimentConfig::with_channel(dense())
        },
        "fig5_sparse" => ExperimentConfig {
            receivers: baseline,
            snr_grid: grid(0.0, 24.0, 2.0),
            ..ExperimentConfig::with_channel(sparse())
        },
        "fig_phase" => ExperimentConfig {
            receivers: [MbETeIr, PqETeIr]
                .iter()
                .flat_map(|&i| [ReceiverSpec::new(i).at_phase(0.0), ReceiverSpec::new(i).at_phase(45.0)])
                .collect(),
            ..ExperimentConfig::default()
        },
        "fig_coded" => ExperimentConfig {
            receivers: [LlrMode::Exact, LlrMode::MaxLog, LlrMode::Hard]
                .iter()
                .map(|&m| ReceiverSpec::new(MbETeIr).with_llr(m))
                .collect(),
            coding: Coding::ConvR12,
            snr_grid: grid(0.0, 20.0, 1.0),
            ..ExperimentConfig::default()
        },
        "fig7_imb_awgn" => ExperimentConfig {
            receivers: imbalanced,
            imbalance: preset_imbalance,
            snr_grid: grid(0.0, 40.0, 2.0),
            ..ExperimentConfig::default()
        },
        "fig8_imb_dense" => ExperimentConfig {
            receivers: imbalanced,
            imbalance: preset_imbalance,
            snr_grid: grid(0.0, 24.0, 2.0),
            ..ExperimentConfig::with_channel(dense())
        },
        "fig9_imb_sparse" => ExperimentConfig {
            receivers: imbalanced,
            imbalance: preset_imbalance,
            snr_grid: grid(0.0, 24.0, 2.0),
            ..ExperimentConfig::with_channel(sparse())
        },
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_examples() {
        let c = preset("fig7_imb_awgn").unwrap();
        assert_eq!(c.imbalance.alpha, 0.1);
        assert!((c.imbalance.theta.to_degrees() - 2.5).abs() < 1e-12);
        assert_eq!(preset("fig3_awgn").unwrap().n_training, 100);
        assert_eq!(preset("fig4_dense").unwrap().realizations, 100);
        assert!(matches!(preset("fig99"), Err(Error::UnknownPreset(_))));
        for id in PRESETS {
            preset(id).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn grid_includes_stop() {
        assert_eq!(grid(0.0, 4.0, 2.0), vec![0.0, 2.0, 4.0]);
        assert_eq!(grid(0.0, 40.0, 2.0).len(), 21);
    }

    #[test]
    fn toml_round_trip() {
        for id in PRESETS {
            let c = preset(id).unwrap();
            let back = ExperimentConfig::from_toml_str(&c.to_toml_string()).unwrap();
            assert_eq!(back.receivers, c.receivers, "{id}");
            assert_eq!(back.channel, c.channel);
            assert_eq!(back.snr_grid, c.snr_grid);
            assert_eq!(back.window, c.window);
            assert_eq!(back.coding, c.coding);
            assert!((back.imbalance.theta - c.imbalance.theta).abs() < 1e-15);
        }
    }

    #[test]
    fn flat_file_with_defaults() {
        let c = ExperimentConfig::from_toml_str(
            "receivers = [\"MB-F-MF\", \"MB-E-TE-IR@45\"]\nchannel = \"dense\"\nsnr_grid = [0.0, 5.0]\nphase = \"30\"\n",
        )
        .unwrap();
        assert_eq!(c.receivers.len(), 2);
        assert_eq!(c.window.symbol_len, 192);
        assert_eq!(c.phase_mode, PhaseMode::Fixed(30.0));
        for bad in [
            "bogus = 1",
            "channel = \"cm9\"",
            "receivers = [\"XX\"]",
            "n_training = 0",
            "alpha = 1.5",
        ] {
            assert!(
                matches!(ExperimentConfig::from_toml_str(bad), Err(Error::Config(_))),
                "{bad}"
            );
        }
    }
}
