use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    /// Division by zero, logarithm of a non-positive value, or a real power
    /// of a negative base.
    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The state value is at or below the degeneracy point of the wave speed.
    #[error("degenerate wave speed: theta = {theta} is not above theta0 = {theta0}")]
    Degeneracy { theta: f64, theta0: f64 },

    #[error("quadrature on [{lo}, {hi}] missed tolerance (estimated error {estimate:e})")]
    Quadrature { lo: f64, hi: f64, estimate: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("characteristic left the grid at t = {t}, x = {x}")]
    OutOfDomain { t: f64, x: f64 },

    #[error("fit error: {0}")]
    Fit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
