use std::fmt;
use std::str::FromStr;

use crate::coding::LlrMode;
use crate::frontend::SamplingMode;
use crate::Error;

/// Receiver taxonomy: front end (FR, MB, PQ), channel knowledge (F, E),
/// weighting (ML, MF, TE, DT, CW) and the IR / SI suffixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReceiverId {
    FrFMf,
    MbFMl,
    MbFMf,
    MbFMfSi,
    MbETe,
    MbETeIr,
    MbEDt,
    MbEDtIr,
    MbECw,
    MbECwIr,
    PqETe,
    PqETeIr,
}

/// Training sequence a receiver needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrainingKind {
    None,
    /// All symbols (1,1).
    Single,
    /// First half (1,1), second half (1,-1).
    Double,
}

impl ReceiverId {
    pub const ALL: [Self; 12] = [
        Self::FrFMf,
        Self::MbFMl,
        Self::MbFMf,
        Self::MbFMfSi,
        Self::MbETe,
        Self::MbETeIr,
        Self::MbEDt,
        Self::MbEDtIr,
        Self::MbECw,
        Self::MbECwIr,
        Self::PqETe,
        Self::PqETeIr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::FrFMf => "FR-F-MF",
            Self::MbFMl => "MB-F-ML",
            Self::MbFMf => "MB-F-MF",
            Self::MbFMfSi => "MB-F-MF-SI",
            Self::MbETe => "MB-E-TE",
            Self::MbETeIr => "MB-E-TE-IR",
            Self::MbEDt => "MB-E-DT",
            Self::MbEDtIr => "MB-E-DT-IR",
            Self::MbECw => "MB-E-CW",
            Self::MbECwIr => "MB-E-CW-IR",
            Self::PqETe => "PQ-E-TE",
            Self::PqETeIr => "PQ-E-TE-IR",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::FrFMf => "full-resolution matched filter with perfect reference and phase",
            Self::MbFMl => "monobit maximum-likelihood detector with exact chip error probabilities",
            Self::MbFMf => "monobit linear combiner with matched-filter weights",
            Self::MbFMfSi => "monobit matched-filter combinational weights with known sign factors",
            Self::MbETe => "monobit Taylor-expansion combiner, weights from training",
            Self::MbETeIr => "MB-E-TE with small-weight removal and iterative demodulation",
            Self::MbEDt => "monobit double-training combiner",
            Self::MbEDtIr => "MB-E-DT with small-weight removal and iterative demodulation",
            Self::MbECw => "monobit combinational-weight combiner with estimated sign factors",
            Self::MbECwIr => "MB-E-CW with small-weight removal and iterative demodulation",
            Self::PqETe => "8-sector phase-quantization combiner, weights from training",
            Self::PqETeIr => "PQ-E-TE with small-weight removal and iterative demodulation",
        }
    }

    pub fn sampling(self) -> SamplingMode {
        match self {
            Self::FrFMf => SamplingMode::FullResolution,
            Self::PqETe | Self::PqETeIr => SamplingMode::Phase8,
            _ => SamplingMode::Monobit,
        }
    }

    pub fn training(self) -> TrainingKind {
        match self {
            Self::FrFMf | Self::MbFMl | Self::MbFMf | Self::MbFMfSi => TrainingKind::None,
            Self::MbEDt | Self::MbEDtIr | Self::MbECw | Self::MbECwIr => TrainingKind::Double,
            Self::MbETe | Self::MbETeIr | Self::PqETe | Self::PqETeIr => TrainingKind::Single,
        }
    }

    /// Whether small-weight removal and iterative demodulation apply.
    pub fn refines(self) -> bool {
        matches!(self, Self::MbETeIr | Self::MbEDtIr | Self::MbECwIr | Self::PqETeIr)
    }
}

impl fmt::Display for ReceiverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReceiverId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown receiver `{s}`")))
    }
}

/// A receiver entry of an experiment, optionally pinned to a carrier phase
/// (`@45`) or an LLR mode for coded runs (`/LLR-Sub`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverSpec {
    pub id: ReceiverId,
    pub phase_deg: Option<f64>,
    pub llr: Option<LlrMode>,
}

impl ReceiverSpec {
    pub fn new(id: ReceiverId) -> Self {
        Self {
            id,
            phase_deg: None,
            llr: None,
        }
    }

    pub fn at_phase(mut self, deg: f64) -> Self {
        self.phase_deg = Some(deg);
        self
    }

    pub fn with_llr(mut self, llr: LlrMode) -> Self {
        self.llr = Some(llr);
        self
    }
}

impl From<ReceiverId> for ReceiverSpec {
    fn from(id: ReceiverId) -> Self {
        Self::new(id)
    }
}

impl fmt::Display for ReceiverSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id)?;
        if let Some(p) = self.phase_deg {
            write!(f, "@{p}")?;
        }
        if let Some(l) = self.llr {
            write!(f, "/{}", l.label())?;
        }
        Ok(())
    }
}

impl FromStr for ReceiverSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let (rest, llr) = match s.split_once('/') {
            Some((r, l)) => {
                let mode = [LlrMode::Exact, LlrMode::MaxLog, LlrMode::Hard]
                    .into_iter()
                    .find(|m| m.label().eq_ignore_ascii_case(l.trim()))
                    .ok_or_else(|| Error::Config(format!("unknown LLR mode `{l}`")))?;
                (r, Some(mode))
            }
            None => (s, None),
        };
        let (id, phase_deg) = match rest.split_once('@') {
            Some((id, p)) => {
                let deg = p
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad phase in `{s}`")))?;
                (id, Some(deg))
            }
            None => (rest, None),
        };
        Ok(Self {
            id: id.parse()?,
            phase_deg,
            llr,
        })
    }
}
