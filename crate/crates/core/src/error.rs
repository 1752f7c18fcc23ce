use thiserror::Error;

use crate::formula::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("frame condition w ∈ av(w) ⊆ pv(w) fails at world {0}")]
    FrameViolation(String),
    #[error("a model needs at least one world")]
    EmptyWorldSet,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{worlds} worlds exceeds the limit of {limit} for this operation")]
    TooLarge { worlds: usize, limit: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("atom {0} has no valuation in this model")]
    UnknownAtom(String),
    #[error("cannot seed O(Y|Z) with disjoint Y and Z")]
    DisjointSeed,
    #[error("closure did not stabilize within {0} sweeps")]
    IterationLimit(usize),
    #[error("line {line}: {reason}")]
    ScenarioSyntax { line: usize, reason: String },
    #[error("undeclared world {0}")]
    UndeclaredWorld(String),
    #[error("undeclared atom {0}")]
    UndeclaredAtom(String),
    #[error("unknown fixture {0}")]
    UnknownFixture(String),
}
