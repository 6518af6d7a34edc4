use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRatError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("zero direction vector")]
    ZeroDirection,
    #[error("empty interval [{lo}, {hi}]")]
    EmptyInterval { lo: Rat, hi: Rat },
    #[error("homothety scale must be positive, got {0}")]
    NonPositiveScale(Rat),
    #[error("line is not contained in the plane")]
    LineNotInPlane,
}

/// Search ran out of node budget before reaching a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("search budget of {budget} nodes exhausted")]
pub struct BudgetExhausted {
    pub budget: u64,
}
