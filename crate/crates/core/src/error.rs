use std::path::PathBuf;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid pulse specification: {0}")]
    InvalidPulse(String),
    #[error("channel delay spread {spread_s:e} s exceeds the symbol duration {symbol_s:e} s")]
    DelaySpreadExceedsSymbol { spread_s: f64, symbol_s: f64 },
    #[error("reference waveform has zero energy")]
    ZeroEnergyWaveform,
    #[error("channel realization has no taps")]
    EmptyChannel,
    #[error("channel tap {index} has a non-zero imaginary gain; reference waveforms are real-valued")]
    ComplexGain { index: usize },
    #[error("invalid channel profile: {0}")]
    InvalidProfile(String),
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("tap delays must be strictly increasing (line {line})")]
    NonMonotoneDelays { line: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("frame is missing the I+Q / I-Q branches")]
    MissingAuxBranches,
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("at {snr_db} dB, realization {realization}: {source}")]
    Trial {
        snr_db: f64,
        realization: usize,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
