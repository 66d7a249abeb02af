use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by the whole library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown factor label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate factor label `{0}`")]
    DuplicateLabel(String),

    #[error("factor `{label}` must have dimension >= 1")]
    EmptyFactor { label: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coherent state truncated at {cutoff} levels loses {deficit:.3e} of its norm (tolerance {tolerance:.1e})")]
    TruncationExceeded {
        cutoff: usize,
        deficit: f64,
        tolerance: f64,
    },

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("norm drift {drift:.3e} exceeds {limit:.1e}; time step too large")]
    NormDrift { drift: f64, limit: f64 },

    #[error("trace drift {drift:.3e} exceeds {limit:.1e}")]
    TraceDrift { drift: f64, limit: f64 },

    #[error("jump-time bisection did not converge within {0} iterations")]
    JumpBisection(usize),

    #[error("step-size convergence check failed: observable `{name}` changed by {change:.3e} (limit {limit:.1e})")]
    NotConverged {
        name: String,
        change: f64,
        limit: f64,
    },

    #[error("config error at line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error("config field `{field}`: {message}")]
    ConfigField { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// True for failures caused by user configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::ConfigSyntax { .. }
                | Error::ConfigField { .. }
                | Error::InvalidParameter { .. }
                | Error::UnknownLabel(_)
                | Error::DuplicateLabel(_)
                | Error::EmptyFactor { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
