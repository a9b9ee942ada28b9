use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("{stage} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        stage: String,
        iterations: usize,
        residual: f64,
        /// Per-iteration residual history, when the stage keeps one.
        trace: Vec<f64>,
    },

    #[error("unsolvable problem: {0}")]
    Unsolvable(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("unphysical state: {0}")]
    State(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Prefix the message with where it happened (slice index, species, ...).
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            Error::InvalidInput(m) => Error::InvalidInput(format!("{ctx}: {m}")),
            Error::Unsolvable(m) => Error::Unsolvable(format!("{ctx}: {m}")),
            Error::Singular(m) => Error::Singular(format!("{ctx}: {m}")),
            Error::State(m) => Error::State(format!("{ctx}: {m}")),
            Error::NonConvergence {
                stage,
                iterations,
                residual,
                trace,
            } => Error::NonConvergence {
                stage: format!("{ctx}: {stage}"),
                iterations,
                residual,
                trace,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
