use thiserror::Error;

/// Errors raised by the semigroup transforms and the analysis layers built on them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A computation that must be exact produced an inexact result.
    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    /// The element counts cannot come from a free commutative monoid.
    #[error("not a semigroup: degree {degree}: {reason}")]
    NotASemigroup { degree: usize, reason: String },

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("non-geometric growth: ratio estimate {ratio}, root estimate {root}")]
    NonGeometricGrowth { ratio: f64, root: f64 },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("zero denominator: G({degree}) = 0")]
    ZeroDenominator { degree: usize },

    #[error("divergent envelope: {0}")]
    DivergentEnvelope(String),

    #[error("residuals show no decay over the window")]
    NoDecay,

    #[error("tail unbounded: {0}")]
    TailUnbounded(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse(format!("{other:?}")),
        }
    }
}
