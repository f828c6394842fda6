use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid channel parameter: {0}")]
    InvalidChannel(String),
    #[error("invalid degree pair (d_l={d_l}, d_r={d_r}): {reason}")]
    InvalidDegree {
        d_l: usize,
        d_r: usize,
        reason: String,
    },
    #[error("invalid chain length L={0}, must be at least 1")]
    InvalidChain(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("quadrature self-check failed: {0}")]
    QuadratureFailure(String),
    #[error("bracket failure: {0}")]
    BracketFailure(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("size mismatch: n*d_l={sockets} is not divisible by d_r={d_r}")]
    SizeMismatch { sockets: usize, d_r: usize },
    #[error("code dimension {0} too large for exhaustive decoding (max 20)")]
    DimensionTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
