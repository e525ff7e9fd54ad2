use thiserror::Error;

/// Errors raised by the crescent algebra, measures, partitioner and drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("partitions do not share the same parent crescent")]
    ParentMismatch,
    #[error("tag {tag} lies outside the closure of its cell {cell}")]
    TagOutsideCell { tag: String, cell: String },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("subdivision exceeded depth {max_depth} near {near}")]
    SubdivisionLimitExceeded { max_depth: u32, near: String },
    #[error("cell budget of {0} cells exceeded")]
    CellBudgetExceeded(usize),
    #[error("gauge is not strictly positive at {point} (value {value})")]
    NonPositiveGauge { point: String, value: f64 },
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("valuation is not normalised (total weight {0})")]
    NotNormalised(f64),
    #[error("operation requires set carriers, found a point carrier")]
    PointCarrier,
    #[error("could not build enlargement/shrinkage for tolerance {0}")]
    EnlargementFailure(f64),
    #[error("monotonicity violated: {0}")]
    MonotonicityViolation(String),
    #[error("pullback depth cap exceeded at {0}")]
    PullbackDepthExceeded(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
