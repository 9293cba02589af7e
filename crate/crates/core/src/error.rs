use thiserror::Error;

pub type Result<T> = std::result::Result<T, IlsError>;

#[derive(Debug, Error)]
pub enum IlsError {
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    /// Raised by QR when a diagonal entry of R falls below the drop tolerance.
    #[error("matrix is numerically rank deficient (|R[{index}][{index}]| = {value:e})")]
    RankDeficient { index: usize, value: f64 },

    /// Cholesky pivot was not positive. For an ILS problem this means
    /// `A^T Sigma A` is not positive definite and the minimizer is not unique.
    #[error("matrix is not positive definite (pivot {index} = {value:e}); A^T Sigma A must be positive definite for a unique ILS solution")]
    NotPositiveDefinite { index: usize, value: f64 },

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("triangular matrix has zero diagonal at {0}")]
    SingularTriangular(usize),

    #[error("selected solution L^T x is zero")]
    ZeroSelection,

    #[error("selected solution component {0} is zero; componentwise measure undefined")]
    ZeroComponent(usize),

    #[error("residual is zero; normwise formula undefined")]
    ZeroResidual,

    #[error("problem too large for dense evaluation ({size} > {limit})")]
    SizeExceeded { size: usize, limit: usize },

    #[error("A^T has a trivial null space (m = n)")]
    DegenerateNullspace,

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl IlsError {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        IlsError::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }
}
