use std::fmt;

/// A single failed parameter invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A closure or operation was called outside its domain.
    Domain(String),
    /// Parameter/condition bundle failed validation.
    InvalidParameters(Vec<Violation>),
    /// Time integration failed.
    Integration(String),
    /// A drying simulation failed; carries the integrator diagnostic plus state context.
    Simulation(String),
    /// Surrogate construction failed (rank deficiency, too few samples, ...).
    Fit(String),
    /// A chance constraint cannot be met inside the admissible bounds.
    Infeasible(String),
    /// Malformed configuration or unknown names.
    Config(String),
    Io(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::InvalidParameters(v) => {
                write!(f, "invalid parameters:")?;
                for item in v {
                    write!(f, " [{item}]")?;
                }
                Ok(())
            }
            Error::Integration(m) => write!(f, "integration failed: {m}"),
            Error::Simulation(m) => write!(f, "simulation failed: {m}"),
            Error::Fit(m) => write!(f, "surrogate fit failed: {m}"),
            Error::Infeasible(m) => write!(f, "infeasible: {m}"),
            Error::Config(m) => write!(f, "configuration error: {m}"),
            Error::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
