use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Each variant maps onto one failure class; [`Error::class`] groups them the
/// way the command-line front end reports them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("degenerate direction: |beta(u)| = {beta_abs:e} is below the tangential tolerance")]
    DegenerateDirection { beta_abs: f64 },

    #[error("degenerate boundary point: {0}")]
    DegeneratePoint(String),

    #[error("degenerate separation: {0}")]
    DegenerateSeparation(String),

    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("accuracy: {0}")]
    Accuracy(String),

    #[error("ill-conditioned: {0}")]
    Conditioning(String),

    #[error("root quality: {0}")]
    RootQuality(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse failure classes used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad arguments or violated preconditions.
    Precondition,
    /// Numerical accuracy or conditioning failures.
    Numerical,
    /// Filesystem failures.
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Domain(_)
            | Error::DegenerateDirection { .. }
            | Error::DegeneratePoint(_)
            | Error::Size(_)
            | Error::InvalidInput(_)
            | Error::Parse(_) => ErrorClass::Precondition,
            Error::Singularity(_)
            | Error::DegenerateSeparation(_)
            | Error::Accuracy(_)
            | Error::Conditioning(_)
            | Error::RootQuality(_) => ErrorClass::Numerical,
            Error::Io(_) => ErrorClass::Io,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
