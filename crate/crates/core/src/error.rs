use thiserror::Error;

/// Errors raised by the elicitation engine.
///
/// Each variant maps to exactly one machine-readable code (see [`ElicitError::code`]),
/// which the HTTP service and the CLI surface to clients.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElicitError {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An expert judgement violates the elicitation protocol (ordering, bounds).
    #[error("invalid judgement: {0}")]
    InvalidJudgement(String),

    /// The optimiser did not reach the required tolerance.
    #[error("fit failure: {message} (best params {params:?}, residual {residual:e})")]
    FitFailure {
        message: String,
        params: Vec<f64>,
        residual: f64,
    },

    /// The session is not in a state that permits the requested step.
    #[error("state error: {0}")]
    State(String),

    /// The transform tag is unknown or the transform cannot represent the data.
    #[error("invalid transform: {0}")]
    InvalidTransform(String),

    /// Feedback or other configuration is out of range.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A serialized document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// A parsed document violates a stated invariant.
    #[error("validation error [{invariant}]: {message}")]
    Validation { invariant: String, message: String },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl ElicitError {
    pub fn code(&self) -> &'static str {
        match self {
            ElicitError::Domain(_) => "domain-error",
            ElicitError::InvalidJudgement(_) => "invalid-judgement",
            ElicitError::FitFailure { .. } => "fit-failure",
            ElicitError::State(_) => "state-error",
            ElicitError::InvalidTransform(_) => "invalid-transform",
            ElicitError::InvalidConfig(_) => "invalid-config",
            ElicitError::Parse(_) => "parse-error",
            ElicitError::Validation { .. } => "validation-error",
            ElicitError::NotFound(_) => "not-found",
            ElicitError::Io(_) => "io-error",
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        ElicitError::Domain(msg.into())
    }

    pub(crate) fn judgement(msg: impl Into<String>) -> Self {
        ElicitError::InvalidJudgement(msg.into())
    }

    pub(crate) fn validation(invariant: &str, msg: impl Into<String>) -> Self {
        ElicitError::Validation {
            invariant: invariant.to_string(),
            message: msg.into(),
        }
    }
}

impl From<std::io::Error> for ElicitError {
    fn from(e: std::io::Error) -> Self {
        ElicitError::Io(e.to_string())
    }
}

pub type Result<T, E = ElicitError> = std::result::Result<T, E>;
