use thiserror::Error;

/// Errors produced by the solver, the quadrature routines and the CLI front end.
///
/// An equation whose initial data violate the existence conditions is *not* an
/// error: `solve` reports that through [`crate::problem::Verdict::Unsolvable`].
#[derive(Debug, Error)]
pub enum FdeError {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The problem definition is inconsistent (ordering, coefficients, initial-value keys).
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// The requested grid is too coarse for the operation to be meaningful.
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    /// The Mittag-Leffler series could not be certified to the requested
    /// tolerance. `best_bound` is the tightest rigorous error bound achieved
    /// and `value` the partial sum it applies to.
    #[error("series tolerance not certified: best bound {best_bound:.3e} > tol {tol:.3e} after {layers} layers")]
    Truncation {
        value: f64,
        best_bound: f64,
        tol: f64,
        layers: usize,
    },

    /// A caller violated an operation precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The implicit step equation of the time-stepper became (near) singular.
    #[error("step failure: {0}")]
    StepFailure(String),

    /// Two sampled functions do not share a grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A problem file could not be parsed. Reports the offending line.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, FdeError>;
