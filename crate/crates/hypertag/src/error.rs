use thiserror::Error;

/// Errors produced by graph construction, training, evaluation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("point outside the open unit ball (norm = {norm})")]
    OutsideBall { norm: f64 },

    #[error("non-finite {what} at epoch {epoch} on pair ({center}, {context})")]
    NonFinite {
        what: &'static str,
        epoch: usize,
        center: String,
        context: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Short machine-parseable kind tag, used by the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::Parse { .. } => "parse",
            Error::OutsideBall { .. } => "domain",
            Error::NonFinite { .. } => "non-finite",
            Error::Io(_) => "io",
        }
    }
}
