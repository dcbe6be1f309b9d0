use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("grid error: {0}")]
    Grid(String),

    #[error("invalid density: {0}")]
    Density(String),

    #[error("convergence failure in {op}: {detail}")]
    Convergence { op: &'static str, detail: String },

    #[error("solver error at iteration {iteration}: {detail}")]
    Solver { iteration: usize, detail: String },

    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error("certificate registry: {0}")]
    Registry(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    pub(crate) fn convergence(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Convergence {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
