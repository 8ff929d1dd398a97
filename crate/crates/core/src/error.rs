use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} index {index} out of range (size {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("{0}")]
    Domain(String),

    #[error("instance is not valid: {0}")]
    InvalidInstance(String),

    #[error("weights required but absent")]
    WeightsAbsent,

    #[error("capacities required but absent")]
    CapacitiesAbsent,

    #[error("instance has {edges} edges, above the brute-force cap of {cap}")]
    BruteForceCap { edges: usize, cap: usize },

    #[error("rank {value} outside [0, 1)")]
    RankOutOfRange { value: f64 },

    #[error("rank vector has {got} entries, engine needs {want}")]
    RankDimension { got: usize, want: usize },

    #[error("not a permutation of 0..{len}")]
    InvalidPermutation { len: usize },

    #[error("engine {engine} cannot run on a {kind} instance")]
    EngineMismatch {
        engine: &'static str,
        kind: &'static str,
    },

    #[error("instance file: {0}")]
    Format(String),
}

/// Convenience for `Err(Error::Domain(format!(...)))`.
pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub type Result<T> = std::result::Result<T, Error>;
