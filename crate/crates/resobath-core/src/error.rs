use thiserror::Error;

/// Errors produced by kernel construction, the solvers, and the oracles.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A constructor was handed a parameter that violates a type invariant.
    /// The field name is part of the message so callers can surface it.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter {
        field: &'static str,
        reason: String,
    },

    #[error("empty environment")]
    EmptyEnvironment,

    #[error("grid under-resolves dynamics")]
    GridUnderResolved,

    #[error("unsupported kernel for Laplace path")]
    UnsupportedLaplaceKernel,

    #[error("zero-frequency mode unsupported")]
    ZeroFrequencyMode,

    #[error("oracle limited to small environments")]
    OracleTooLarge,

    #[error("insufficient decay in window")]
    InsufficientDecay,

    #[error("degenerate dipole")]
    DegenerateDipole,

    /// A sampled kernel or a pair of series was built on a different grid
    /// than the one it is being used with.
    #[error("mismatched grids: {0}")]
    GridMismatch(&'static str),

    #[error("quadrature failed to converge: {0}")]
    Quadrature(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
