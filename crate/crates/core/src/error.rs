use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: String,
        needed: u128,
        budget: u128,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("unsupported position class: {0}")]
    UnsupportedClass(String),
    #[error("mesh {mesh} is not below epsilon {epsilon}")]
    MeshViolation { mesh: f64, epsilon: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
