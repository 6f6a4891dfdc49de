use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("parse error at position {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("polynomial is not mixed-homogeneous")]
    NotMixedHomogeneous,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("exponents do not fit the weighted lattice: {0}")]
    LatticeMismatch(String),
    #[error("structural contradiction: {0}")]
    StructuralContradiction(String),
    #[error("series division by a series with zero constant term")]
    ZeroConstantTerm,
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate parallelogram (area {0:e})")]
    Degenerate(f64),
    #[error("edge direction is {0:.3} rad away from the nearest axis")]
    SlopeTooLarge(f64),
    #[error("containment check failed: {0}")]
    Containment(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("delta must lie in (0, 1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("{step} failed: {detail}")]
    Construction { step: String, detail: String },
    #[error("recursion depth {0} exceeds the configured maximum")]
    RecursionDepth(usize),
    #[error("shear coefficient {mu:e} exceeds the bound {bound:e}")]
    ShearBound { mu: f64, bound: f64 },
    #[error("no separation constant found after {0} halvings: {1}")]
    Separation(u32, String),
    #[error("piece budget exceeded ({0} pieces)")]
    Budget(usize),
}

impl EngineError {
    pub fn construction(step: &str, detail: impl Into<String>) -> Self {
        EngineError::Construction { step: step.to_string(), detail: detail.into() }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("work estimate {needed:e} exceeds the budget {budget:e}")]
    Budget { needed: f64, budget: f64 },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("partition has no pieces")]
    EmptyPartition,
    #[error("coefficient list does not match the cloud")]
    Shape,
}
