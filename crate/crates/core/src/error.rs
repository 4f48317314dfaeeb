use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("point lies outside the hull (distance {distance:e})")]
    NotInHull { distance: f64 },
    #[error("bodies overlap (distance {distance:e})")]
    Overlap { distance: f64 },
    #[error("Lipschitz inconsistency between points {i} and {j}: ratio {ratio} exceeds L = {lipschitz}")]
    LipschitzViolation { i: usize, j: usize, ratio: f64, lipschitz: f64 },
    #[error("modulus violated by pair ({i}, {j})")]
    ModulusViolation { i: usize, j: usize },
    #[error("search box exhausted at node {node}")]
    BoxExhausted { node: String },
    #[error("solver did not converge: {0}")]
    NonConvergence(String),
    #[error("enumeration guard: {count} subsets exceeds the limit of {limit}")]
    EnumerationGuard { count: u128, limit: u128 },
    #[error("inconsistent graph: {0}")]
    InconsistentGraph(String),
    #[error("no admissible delta: modulus does not vanish at 0 (first value {0})")]
    NoAdmissibleDelta(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
