use thiserror::Error;

/// Failure modes shared by every module of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("capacity error: {0}")]
    Capacity(String),

    #[error("underdetermined: projector family has rank {rank}, {required} required")]
    Underdetermined { rank: usize, required: usize },

    #[error("inconsistent valuation: least-squares residual {residual:e} exceeds {limit:e}")]
    Residual { residual: f64, limit: f64 },

    #[error("degenerate conditioning: kept detectors have overlap {overlap:e}")]
    DegenerateConditioning { overlap: f64 },

    #[error("no witness: state has a positive partial transpose (min eigenvalue {min_eigenvalue:e})")]
    NoWitness { min_eigenvalue: f64 },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
