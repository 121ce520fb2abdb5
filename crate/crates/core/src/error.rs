use thiserror::Error;

/// Errors produced by the bound, spectrum and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("incompatible spectrum: {0}")]
    IncompatibleSpectrum(String),

    #[error("base bound failed at d* = {d_star}: {msg}")]
    Provider { d_star: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
