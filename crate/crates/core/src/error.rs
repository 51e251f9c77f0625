use thiserror::Error;

/// Errors raised by the channel, rate and optimization layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("distance must be positive, got {0}")]
    NonPositiveDistance(f64),

    #[error("{node} is co-located with the relay")]
    CoLocated { node: String },

    #[error("invalid system configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected} jammer entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("jammer index {index} out of range for {count} jammers")]
    JammerIndex { index: usize, count: usize },

    #[error("relay link unusable: {0}")]
    RelayLinkUnusable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no non-zero secrecy rate is reachable: (g1 + g2) / (g1 g2) = {lhs} >= p_max / sigma^2 = {rhs}")]
    Infeasible { lhs: f64, rhs: f64 },
}

pub type Result<T> = std::result::Result<T, ModelError>;
