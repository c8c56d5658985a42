use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// The surfaces would touch or intersect.
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("tilt drift brings the surfaces into contact at step {step} (separation {separation:e} m)")]
    TiltContact { step: usize, separation: f64 },

    #[error("underdetermined fit: {0}")]
    Underdetermined(String),

    #[error("inconsistent data: {0}")]
    InconsistentData(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("numerical error: {message} (last estimate {last_estimate:e}, nodes {nodes})")]
    Numerical {
        message: String,
        last_estimate: f64,
        nodes: usize,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },

    #[error("invalid configuration:\n  - {}", .0.join("\n  - "))]
    Config(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Coarse category used for process exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_) | Error::Geometry(_) | Error::TiltContact { .. } => {
                ErrorKind::Validation
            }
            Error::Parse { .. } | Error::Config(_) => ErrorKind::Validation,
            Error::Numerical { .. } => ErrorKind::Numerical,
            Error::Io(_) => ErrorKind::Io,
            Error::Underdetermined(_)
            | Error::InconsistentData(_)
            | Error::InsufficientData(_)
            | Error::NoSolution(_) => ErrorKind::Fit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
    Fit,
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {value:e}")))
    }
}
