//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("term count {count} exceeds cap {cap}")]
    TermOverflow { count: usize, cap: usize },

    #[error("separation {actual:.3e} below required {required:.3e}")]
    SeparationTooSmall { actual: f64, required: f64 },

    #[error("linear preconditioning failed after {attempts} attempts")]
    Preconditioning { attempts: usize },

    #[error("degree degeneracy: leading coefficient magnitude {0:.3e}")]
    DegreeDegenerate(f64),

    #[error("structural solve unsupported for provenance `{0}`")]
    UnsupportedProvenance(String),

    #[error("point not strictly interior to the unit ball (norm {0})")]
    NotInterior(f64),

    #[error("empty feasible set: {0}")]
    EmptyFeasible(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("operation not applicable: {0}")]
    Capability(String),

    #[error("schedule constraint violated: {0}")]
    Schedule(String),

    #[error("no line witness within the truncated schedule: {0}")]
    TruncationFailure(String),

    #[error("certificate failure: {0}")]
    Certificate(String),

    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
