use thiserror::Error;

/// Errors produced by the algebraic routines of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("context mismatch: {left} vs {right} generators")]
    ContextMismatch { left: usize, right: usize },

    #[error("element is not invertible (zero body)")]
    NotInvertible,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("parity violation: {0}")]
    Parity(String),

    #[error("Berezinian undefined: {0}")]
    BerezinianUndefined(String),

    #[error("more than one ghost column")]
    MultipleGhosts,

    #[error("chart {0} is not admissible for this plane")]
    ChartNotAdmissible(String),

    #[error("impossible shape: {0}")]
    ImpossibleShape(String),

    #[error("unsupported degree {0}")]
    UnsupportedDegree(usize),

    #[error("pivot {0} is not invertible")]
    PivotNotInvertible(String),

    #[error("inconsistent seed: {0}")]
    InconsistentSeed(String),

    #[error("unknown symbol or mutation: {0}")]
    Unknown(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
