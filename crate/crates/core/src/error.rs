use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("N must be a positive integer, got {0}")]
    InvalidN(u64),

    #[error("p must lie strictly between 0 and 1/N (N = {n}), got {p}")]
    InvalidP { n: u64, p: String },

    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(String),

    #[error("alpha is required for this operation")]
    AlphaRequired,

    #[error("support value {b} is outside {{{lo}, ..., {hi}}}")]
    OutsideSupport { b: i64, lo: i64, hi: i64 },

    #[error("index j = {j} exceeds i = {i}")]
    IndexOrder { i: usize, j: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("exact-mode guard: N = {n} exceeds the limit {limit}")]
    ExactGuard { n: u64, limit: u64 },

    #[error("expected {expected} uniforms, got {got}")]
    UniformCount { expected: usize, got: usize },

    #[error("uniform #{index} = {value} is outside [0, 1)")]
    UniformRange { index: usize, value: f64 },

    #[error("cannot parse {0:?} as a number")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
