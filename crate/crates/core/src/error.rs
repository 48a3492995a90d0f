use thiserror::Error;

/// Failure modes shared by every stage of the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("regime not applicable: {0}")]
    Regime(String),
    #[error("standing wave: |c| = {speed:e} is below {threshold:e}")]
    ZeroSpeed { speed: f64, threshold: f64 },
    #[error("front did not converge within {periods} periods (last drift {drift:e})")]
    NoConvergence {
        periods: usize,
        drift: f64,
        history: Vec<f64>,
    },
    #[error("blow-up at t = {t}: state left [-10, 10]")]
    BlowUp { t: f64 },
    #[error("internal consistency: {0}")]
    Consistency(String),
    #[error("insufficient tail: {0}")]
    InsufficientTail(String),
    #[error("domain: {0}")]
    Domain(String),
    #[error("estimation: {0}")]
    Estimation(String),
}

impl Error {
    /// True for errors caused by the coefficients rather than the numerics.
    pub fn is_assumption(&self) -> bool {
        matches!(self, Error::Assumption(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
