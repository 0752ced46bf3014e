use thiserror::Error;

use crate::functional::TableError;
use crate::space::{BasisIndex, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CscError {
    #[error("point {point} is not in basic set {index:?}")]
    PointNotInIntersection { point: Point, index: BasisIndex },
    #[error("point {0} is outside the carrier")]
    PointOutsideCarrier(Point),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("tag violated on window: {0}")]
    TagViolatedOnWindow(String),
    #[error("not T1 on window: no basic set contains {x} but not {y}")]
    NotT1OnWindow { x: Point, y: Point },
    #[error("not Hausdorff on window: {x} and {y} have no disjoint neighbourhoods")]
    NotHausdorffOnWindow { x: Point, y: Point },
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("no separating pair within range for {x}, {y}")]
    NotFoundWithinRange { x: Point, y: Point },
    #[error("witness contract violated: {0}")]
    WitnessContractViolated(String),
    #[error("T2 pair found: {x}, {y}")]
    T2PairFound { x: Point, y: Point },
    #[error("empty intersection within window at step {step}")]
    EmptyIntersectionWithinWindow { step: usize },
    #[error("oracle not tame: {0}")]
    OracleNotTame(String),
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("coloring not stable on window at {x}")]
    NotStableOnWindow { x: Point },
    #[error("decoder window insufficient: {0}")]
    DecoderWindowInsufficient(String),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("exhaustive solver cap exceeded: {n} points (cap {cap})")]
    SolverCap { n: usize, cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("instance invariant: {0}")]
    Instance(String),
}

pub type Result<T, E = CscError> = std::result::Result<T, E>;
