use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected {expected} channels, got {got}")]
    BadChannelCount { expected: usize, got: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("dt must be positive, got {0}")]
    NonPositiveDt(f64),
    #[error("recording needs at least 2 samples, got {0}")]
    TooFewRows(usize),
    #[error("epoch length {epoch_len} exceeds recording length {rows}")]
    EpochTooLong { epoch_len: usize, rows: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("empty series")]
    EmptySeries,
    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("symbol {symbol} out of range for alphabet of size {alphabet}")]
    SymbolOutOfRange { symbol: u32, alphabet: u32 },
    #[error("unknown gait {0:?}")]
    UnknownGait(String),
    #[error("unknown ground {0:?}")]
    UnknownGround(String),
    #[error("numerical blow-up at step {step}: {what} = {value}")]
    NumericalBlowup { step: usize, what: &'static str, value: f64 },
    #[error("insufficient history: need {needed} epochs from index {start}, episode has {available}")]
    InsufficientHistory { needed: usize, start: usize, available: usize },
    #[error("corpus error: {0}")]
    Corpus(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that indicate an unstable numerical configuration
    /// rather than bad input data.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NumericalBlowup { .. })
    }
}
