use thiserror::Error;

/// Errors raised by the operator toolkit.
///
/// Numeric payloads are widened to `f64` so the error type does not depend
/// on the scalar parameter.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not positive semidefinite: eigenvalue {eigenvalue:e} below -{threshold:e}")]
    NotPsd { eigenvalue: f64, threshold: f64 },

    #[error("not an orthogonal projection: {reason}")]
    NotProjection { reason: String },

    #[error("basis columns are not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("dissipation ledger was not recorded for this flow run")]
    LedgerMissing,

    #[error("shorting methods disagree: discrepancy {discrepancy:e} exceeds {tolerance:e}")]
    MethodDisagreement { discrepancy: f64, tolerance: f64 },

    #[error("vector is not in K: off-subspace residual {residual:e}")]
    NotInK { residual: f64 },

    #[error("Loewner order violated: margin {margin:e} below -{tolerance:e}")]
    OrderViolation { margin: f64, tolerance: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
