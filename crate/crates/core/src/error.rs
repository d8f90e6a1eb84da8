use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("unknown initialization strategy `{0}`")]
    UnknownStrategy(String),

    #[error("dataset has no nonzero channel entry; cannot normalize")]
    AllZeroDataset,

    #[error("dataset is already normalized")]
    AlreadyNormalized,

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("beam index {index} out of range for codebook of {len} beams")]
    BeamOutOfRange { index: usize, len: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
