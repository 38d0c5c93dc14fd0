use std::io;

use thiserror::Error;

/// Errors raised anywhere in the optimization toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("expensive evaluation budget exhausted ({used}/{max})")]
    BudgetExhausted { used: usize, max: usize },

    #[error("variable {index} = {value} outside [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("no fitted surrogate for output {0}")]
    ModelNotFitted(usize),

    #[error("linear system is singular even after regularization")]
    SingularSystem,

    #[error("degenerate training data: {0}")]
    DegenerateData(String),

    #[error("every candidate surrogate configuration failed to fit")]
    AllCandidatesFailed,

    #[error("population member {0} has no evaluation")]
    StateCorrupt(u64),

    #[error("told solutions do not match the last ask")]
    TellMismatch,

    #[error("problem `{0}` has no closed-form Pareto front")]
    UnknownFront(String),

    #[error("empty point set")]
    EmptySet,

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("malformed evaluator response: {0}")]
    ProtocolError(String),

    #[error("external evaluator crashed: {0}")]
    EvaluatorCrashed(String),

    #[error("external evaluator reported failure: {0}")]
    EvaluatorFailed(String),

    #[error("external evaluator timed out after {0:?}")]
    Timeout(std::time::Duration),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("experiments are not comparable: {0}")]
    MismatchedExperiment(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// True for failures that originate in an external evaluator process.
    pub fn is_evaluator_failure(&self) -> bool {
        matches!(
            self,
            Error::ProtocolError(_)
                | Error::EvaluatorCrashed(_)
                | Error::EvaluatorFailed(_)
                | Error::Timeout(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
