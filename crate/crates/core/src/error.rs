use thiserror::Error;

use crate::groupoid::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("groupoid axioms violated: {}", join(.0))]
    InvalidGroupoid(Vec<Violation>),

    #[error("invalid group action: {0}")]
    InvalidAction(String),

    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),

    #[error("arrow `{0}` is not a unit")]
    NotAUnit(String),

    #[error("operands live on different groupoids")]
    GroupoidMismatch,

    #[error("unit set is not invariant")]
    NotInvariant,

    #[error("arrow set is not a bisection")]
    NotABisection,

    #[error("bisection is not contained in the support of the function")]
    NotInSupport,

    #[error("measure is not invariant under the action")]
    MeasureNotInvariant,

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("{what} has {size} arrows, above the enumeration cap {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },

    #[error("semidefinite solver stopped with duality gap {gap:.3e} after {iterations} iterations")]
    SdpNotConverged { gap: f64, iterations: usize },

    #[error("inconsistent representation blocks: {0}")]
    InconsistentBlocks(String),

    #[error("subspace does not contain the unit function of `{0}`")]
    MissingUnitFunction(String),

    #[error("closure did not stabilise within {0} rounds")]
    ClosureDiverged(usize),

    #[error("malformed input: {0}")]
    Malformed(String),
}

fn join(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
