use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("basis label {atom}{photons} is not in the N={n_cap} truncated space")]
    InvalidLabel { atom: char, photons: usize, n_cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),

    #[error("trace deviates from one by {0:e}")]
    TraceViolation(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("generator {kind} cannot be used here: {reason}")]
    GeneratorMismatch { kind: &'static str, reason: String },

    #[error("stationary state is not unique ({count} eigenvalues below {threshold:e})")]
    DegenerateNullSpace { count: usize, threshold: f64 },

    #[error("no null vector found: smallest |eigenvalue| {smallest:e} exceeds {threshold:e}")]
    NoNullSpace { smallest: f64, threshold: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("spectral decomposition is unusable at the exceptional point (kappa/g = {0})")]
    ExceptionalPoint(f64),

    #[error("invalid quench schedule: {0}")]
    InvalidSchedule(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("step budget of {0} exhausted")]
    TooManySteps(usize),

    #[error("state at t = {t} is invalid: {reason}")]
    InvalidState { t: f64, reason: String },

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),

    #[error("records cannot be compared: {0}")]
    MismatchedRecords(String),
}

impl Error {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            Error::InvalidLabel { .. }
                | Error::DimensionMismatch { .. }
                | Error::InvalidParams(_)
                | Error::GeneratorMismatch { .. }
                | Error::InvalidSchedule(_)
                | Error::InvalidProtocol(_)
                | Error::InvalidAxis(_)
                | Error::MismatchedRecords(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
