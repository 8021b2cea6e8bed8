use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid variable: {0}")]
    InvalidVariable(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` is the target of more than one factor")]
    DuplicateTarget(String),

    #[error("variable `{0}` is used as a condition but no factor defines it")]
    UndefinedCondition(String),

    #[error("variable `{name}` has cardinality {found}, expected {expected}")]
    CardinalityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("factors do not form an acyclic factorization (cycle through `{0}`)")]
    CyclicFactorization(String),

    #[error("variable set must not be empty")]
    EmptyVariableSet,

    #[error("variable `{0}` appears in more than one argument set")]
    OverlappingSets(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("q({index}) = 0 while p({index}) > 0; divergence is infinite")]
    AbsoluteContinuity { index: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("agent index {index} out of range for {count} agents")]
    AgentIndex { index: usize, count: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("objective returned non-finite value {value} at {params:?}")]
    NonFiniteObjective { value: f64, params: Vec<f64> },
}
