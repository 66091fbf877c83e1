use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Variants that falsify an instance-level claim (`CollisionFound`,
/// `WitnessFailure`) carry a rendered description of the offending data so
/// that the counterexample survives serialization.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(String),
    #[error("prime field context requires a modulus")]
    MissingModulus,
    #[error("rational context takes no modulus")]
    UnexpectedModulus,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different field contexts")]
    ContextMismatch,
    #[error("cannot parse element {0:?}")]
    Parse(String),
    #[error("residue {value} out of range for modulus {modulus}")]
    ResidueOutOfRange { value: String, modulus: String },
    #[error("dilation by zero is not a bijection")]
    ZeroDilation,
    #[error("twist parameter must be nonzero")]
    ZeroTwist,
    #[error("set contains 0 where it is forbidden")]
    ZeroElementPresent,
    #[error("threshold t = {t} outside 1..={max}")]
    TOutOfRange { t: u64, max: u64 },
    #[error("epsilon {0} outside the admissible range")]
    EpsilonOutOfRange(String),
    #[error("interval did not reach the requested width before the precision cap; widest enclosure [{lo}, {hi}]")]
    PrecisionCapExceeded { lo: String, hi: String },
    #[error("graph has {edges} edges, fewer than (1 - eps)|A||B| = {required}")]
    GraphTooSparse { edges: usize, required: String },
    #[error("edge ({0}, {1}) references a vertex outside the graph")]
    EdgeOutOfRange(usize, usize),
    #[error("injection collision: {0}")]
    CollisionFound(String),
    #[error("search budget exceeded: {needed} candidates > budget {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("operation requires the {0} context")]
    FieldMismatch(&'static str),
    #[error("duplicate input: {0}")]
    DuplicateInput(String),
    #[error("witness failure: {0}")]
    WitnessFailure(String),
    #[error("unknown relation {0:?}")]
    UnknownRelation(String),
    #[error("side condition violated: {0}")]
    SideConditionViolated(String),
    #[error("set too small: {0}")]
    SetTooSmall(String),
    #[error("density condition |A|^2 < p violated: |A| = {size}, p = {modulus}")]
    DensityViolated { size: usize, modulus: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
