use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function '{name}' at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("coordinate x{index} at byte {offset} is out of range for dimension {dimension}")]
    CoordinateOutOfRange {
        index: usize,
        dimension: usize,
        offset: usize,
    },
    #[error("domain error in `{subexpression}`: {reason}")]
    Domain {
        reason: String,
        subexpression: String,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("slot {slot} out of range for rank {rank}")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("cannot contract slot {0} with itself")]
    SameSlot(usize),
    #[error("slot {slot} has the wrong variance for this conversion")]
    VarianceMismatch { slot: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("metric is degenerate (|det| = {det:e})")]
    Degenerate { det: f64 },
    #[error("tensor is not symmetric in slots {a} and {b} (deviation {deviation:e})")]
    NotSymmetric { a: usize, b: usize, deviation: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("metric component ({i},{j}): {source}")]
    MetricComponent {
        i: usize,
        j: usize,
        #[source]
        source: ExprError,
    },
    #[error("vector field component {index}: {source}")]
    FieldComponent {
        index: usize,
        #[source]
        source: ExprError,
    },
    #[error("degenerate metric at {point:?}: |det g| = {det:e}")]
    DegenerateMetric { point: Vec<f64>, det: f64 },
    #[error("presets need dimension n >= 3, got {0}")]
    DimensionTooSmall(usize),
    #[error("preset '{0}' needs its free parameters a0 and a1")]
    MissingFreeParameters(&'static str),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("g(xi, xi) = {found} but epsilon = {expected}")]
    NotUnit { expected: f64, found: f64 },
    #[error("manifold '{0}' declares no unit field xi")]
    NoUnitField(String),
    #[error("derivation needs a tensor of rank at least 1")]
    RankZero,
    #[error("invalid manifold description: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
