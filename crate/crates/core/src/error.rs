use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Variants are grouped by [`ErrorClass`] so a front end can map them to
/// process exit codes without matching every variant.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("non-finite value of the profile at {at}")]
    Evaluation { at: f64 },

    #[error("point {value} lies outside the interval [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    #[error(
        "monomial conversion refused for order {n} (cap {cap}); \
         build factor matrices from the Chebyshev form instead"
    )]
    Conditioning { n: usize, cap: usize },

    #[error("invalid Bernstein ellipse parameter rho^2 = {0} (must exceed 1)")]
    InvalidEllipse(f64),

    #[error("order n = {n} must exceed the smoothness index q = {q}")]
    OrderTooLow { n: usize, q: usize },

    #[error("profile is singular or non-finite on the ellipse with rho^2 = {rho_sq}")]
    SingularityInsideEllipse { rho_sq: f64 },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("probability {0} outside [0, 1/2]")]
    InvalidProbability(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("resource cap exceeded: {what} needs {required_bytes} bytes (cap {cap_bytes})")]
    Resource {
        what: String,
        required_bytes: u128,
        cap_bytes: u128,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Constraint,
    Resource,
    Numerical,
    Other,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidDimension(_)
            | Contract(_)
            | Domain { .. }
            | Conditioning { .. }
            | InvalidEllipse(_)
            | OrderTooLow { .. }
            | Constraint(_)
            | InvalidProbability(_)
            | InsufficientData(_) => ErrorClass::Constraint,
            Resource { .. } => ErrorClass::Resource,
            Overflow(_) | Evaluation { .. } | SingularityInsideEllipse { .. } | Numerical(_) => {
                ErrorClass::Numerical
            }
            Format(_) | Io(_) => ErrorClass::Other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
