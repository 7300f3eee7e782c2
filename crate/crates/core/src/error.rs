use thiserror::Error;

/// Errors raised by algebra operations, the inverse oracle and the formula engine.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("elements belong to different algebra contexts")]
    ContextMismatch,

    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("element has Drazin index {index}; group inverse requires index <= 1")]
    NotGroupInvertible { index: usize },

    #[error("hypothesis `{name}` violated: relative residual {residual:.3e} >= {threshold:.3e}")]
    Hypothesis {
        name: String,
        residual: f64,
        threshold: f64,
    },

    #[error("series did not terminate within {max_terms} terms (last term norm {last_norm:.3e})")]
    SeriesDivergence { max_terms: usize, last_norm: f64 },

    #[error("numerical breakdown: {axiom} residual {residual:.3e} exceeds {tolerance:.3e}")]
    Breakdown {
        axiom: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
