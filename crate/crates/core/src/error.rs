use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DunklError {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("multiplicity mismatch between operands")]
    MultiplicityMismatch,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("format error: {0}")]
    Format(String),
}

impl DunklError {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        DunklError::Domain {
            op,
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for DunklError {
    fn from(e: std::io::Error) -> Self {
        DunklError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, DunklError>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(DunklError::DimensionMismatch { expected, got })
    }
}
