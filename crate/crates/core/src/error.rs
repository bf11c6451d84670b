use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("functions live on different groups")]
    GroupMismatch,
    #[error("operation requires an abelian group")]
    NotAbelian,
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("value vector has length {got}, group order is {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("element index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("operator backends are incompatible")]
    BackendMismatch,
    #[error("operator does not belong to VN(G): right-translation residual {0:.3e}")]
    NotInVonNeumannAlgebra(f64),
    #[error("function is not positive definite (most negative spectral value {0:.3e})")]
    NotPositiveDefinite(f64),
    #[error("function does not vanish on the prescribed set (max |u| = {0:.3e})")]
    NotInKernel(f64),
    #[error("function is not supported inside the prescribed set (max |u| outside = {0:.3e})")]
    SupportViolation(f64),
    #[error("coefficient vector drifted from u(s): max deviation {0:.3e}")]
    ConventionDrift(f64),
    #[error("invalid neighborhood chain: {0}")]
    InvalidChain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("bump separation violated: ones and zeros are closer than the required gap")]
    BumpSeparation,
    #[error("no admissible radius reached distance below {eps} (best {best:.3e})")]
    NoAdmissibleRadius { eps: f64, best: f64 },
    #[error("oracle failed at stage {stage}: {reason}")]
    OracleFailure { stage: &'static str, reason: String },
    #[error("oracle output failed verification: {0}")]
    OracleVerification(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
