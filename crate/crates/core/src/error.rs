use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid building model: {0}")]
    InvalidModel(String),

    #[error("invalid TMD design: {0}")]
    InvalidDesign(String),

    #[error("invalid genome: {0}")]
    InvalidGenome(String),

    #[error("invalid search space: {0}")]
    InvalidSpace(String),

    #[error("invalid CRO parameters: {0}")]
    InvalidParams(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("singular dynamic stiffness at omega = {omega} rad/s")]
    SingularAt { omega: f64 },

    #[error("transfer function evaluated at an undamped pole (omega_t = {omega_t} rad/s)")]
    Pole { omega_t: f64 },

    #[error("time-domain check inconclusive: {0}")]
    Inconclusive(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Parse { path: path.into(), message: message.to_string() }
    }

    /// Process exit code for the CLI, grouped by failure category.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidModel(_)
            | Error::InvalidDesign(_)
            | Error::InvalidGenome(_)
            | Error::InvalidSpace(_)
            | Error::InvalidParams(_)
            | Error::Parse { .. } => 2,
            Error::Numerical(_) | Error::SingularAt { .. } | Error::Pole { .. } | Error::Inconclusive(_) => 3,
            Error::Io { .. } => 4,
        }
    }
}
