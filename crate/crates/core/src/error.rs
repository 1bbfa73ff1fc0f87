use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TautError {
    #[error("inconsistent sample: point ({x}, {y}) does not lie on the degree-{degree} interpolant")]
    InconsistentSample { x: String, y: String, degree: usize },
    #[error("not enough interpolation points: need {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("repeated abscissa {0} in interpolation data")]
    RepeatedAbscissa(String),
    #[error("unstable space: 2g-2+n <= 0 for (g, n) = ({g}, {n})")]
    UnstableSpace { g: usize, n: usize },
    #[error("ambient mismatch: ({0}, {1}) vs ({2}, {3})")]
    AmbientMismatch(usize, usize, usize, usize),
    #[error("vertex space mismatch at vertex {vertex}: expected ({g}, {n})")]
    VertexSpaceMismatch { vertex: usize, g: usize, n: usize },
    #[error("forgetful target unstable: ({g}, {n})")]
    TargetUnstable { g: usize, n: usize },
    #[error("modular constraint violated: sum of fields {sum} is not {expected} mod {r}")]
    ModularConstraint { sum: i64, expected: i64, r: i64 },
    #[error("parts do not sum to zero (sum = {0})")]
    PartsSum(i64),
    #[error("m must be >= 1, got {0}")]
    FrozenLegsRequired(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("uncancelled term: {0}")]
    UncancelledTerm(String),
}

pub type Result<T> = std::result::Result<T, TautError>;
