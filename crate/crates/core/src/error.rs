//! Error type shared by all solvers and kernels.

use thiserror::Error;

/// Errors produced by operators, stepsize formulas and solvers.
#[derive(Debug, Error)]
pub enum SolverError {
    /// Vector or matrix dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A stepsize formula hit a zero denominator.
    #[error("undefined stepsize: {0}")]
    UndefinedStepsize(&'static str),

    /// A Rayleigh quotient came out nonpositive on a supposedly SPD operator.
    #[error("operator is not positive definite (g'Ag = {0:.6e})")]
    NotPositiveDefinite(f64),

    /// Backtracking exhausted its halving budget.
    #[error("line search failed after {0} halvings; gradient or objective is inconsistent")]
    LineSearchFailure(usize),

    /// The supplied direction does not point downhill.
    #[error("not a descent direction (g'd = {0:.6e})")]
    NotDescent(f64),

    /// The constraint set admits no feasible point.
    #[error("infeasible constraint set: {0}")]
    Infeasible(String),

    /// A NaN or infinity showed up where finite values are required.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Bad argument outside any more specific category.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A text input (COO or LIBSVM file) failed to parse.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
