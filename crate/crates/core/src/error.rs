use alloc::vec::Vec;
use thiserror::Error;

use crate::game::Position;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("target must be between 1 and {max}, got {0}", max = crate::game::MAX_TARGET)]
    InvalidTarget(u32),
    #[error("cannot bank at {0}: no open points")]
    IllegalAction(Position),
    #[error("position {0} is not alive")]
    DeadPosition(Position),
    #[error("continue requires a coin outcome")]
    MissingToss,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("singular system: no pivot in column {column}")]
    SingularSystem { column: usize },
    #[error("malformed system: {0}")]
    Malformed(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("analytic method needs n >= 2, got {0}")]
    TargetTooSmall(u32),
    #[error("no known value for reduced position {0}")]
    MissingKnownValue(Position),
    #[error("strategy budget exceeded: {needed} evaluations needed, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },
    #[error("no equilibrium assignment found for the component containing {0}")]
    NoEquilibrium(Position),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("iterative method needs n >= 2, got {0}")]
    TargetTooSmall(u32),
    #[error("not converged after {sweeps} sweeps; {} positions undecided", undecided.len())]
    NotConverged {
        sweeps: u32,
        undecided: Vec<Position>,
    },
    #[error("exact verification did not settle after {0} corrections")]
    VerificationFailed(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("split point {x} out of range for {r} needed points")]
    DomainError { r: u32, x: u32 },
    #[error(transparent)]
    Interval(#[from] IntervalError),
}
