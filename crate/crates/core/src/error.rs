use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank exceeds popcount: rank {rank}, popcount {popcount}")]
    RankOutOfRange { rank: usize, popcount: usize },

    #[error("index out of bounds: index {index}, length {len}")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("sequence not monotone at position {position}")]
    NotMonotone { position: usize },

    #[error("duplicate key")]
    DuplicateKey,

    #[error("duplicate keys")]
    DuplicateKeys,

    #[error("retrieval construction failed after {attempts} seeds")]
    RetrievalFailed { attempts: u32 },

    #[error("bucket unconstructible after {seeds} seeds")]
    BucketUnconstructible { seeds: u64 },

    #[error("construction failed: alpha too aggressive (bucket {bucket})")]
    AlphaTooAggressive { bucket: usize },

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: [u8; 8] },

    #[error("version mismatch: found {found}, supported {supported}")]
    VersionMismatch { found: u32, supported: u32 },

    #[error("truncated input")]
    Truncated,

    #[error("checksum mismatch")]
    ChecksumMismatch,

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
