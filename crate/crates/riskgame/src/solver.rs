//! One entry point for both solution methods, with failures sorted by the
//! exit code they map to.

use riskgame_core::analytic::{solve_analytic, StrategyReport};
use riskgame_core::interval::{solve_iterative, Solution};
use riskgame_core::{AnalyticError, GameParams, IntervalError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    #[default]
    Iterative,
    Analytic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub method: Method,
    pub epsilon: f64,
    pub max_sweeps: u32,
    pub budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: Method::Iterative,
            epsilon: riskgame_core::interval::DEFAULT_EPSILON,
            max_sweeps: riskgame_core::interval::DEFAULT_MAX_SWEEPS,
            budget: riskgame_core::analytic::DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug)]
pub enum SolveFailure {
    /// Bad input such as a target below 2.
    Usage(String),
    /// The interval bounds did not separate in time.
    NotConverged(IntervalError),
    /// Too many strategies to enumerate, or the exact audit kept flipping.
    Budget(String),
    Internal(String),
}

impl SolveFailure {
    pub fn exit_code(&self) -> u8 {
        match self {
            SolveFailure::Usage(_) => 1,
            SolveFailure::NotConverged(_) => 2,
            SolveFailure::Budget(_) => 3,
            SolveFailure::Internal(_) => 4,
        }
    }
}

impl std::fmt::Display for SolveFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveFailure::Usage(m) | SolveFailure::Budget(m) | SolveFailure::Internal(m) => {
                f.write_str(m)
            }
            SolveFailure::NotConverged(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SolveFailure {}

/// Repackage an analytic result in the same shape as an iterative one.
pub fn solution_from_report(report: StrategyReport) -> Solution {
    Solution {
        params: report.params,
        p_first: report.p_first().clone(),
        policy: report.optimal,
        values: report.values,
        ties: report.ties,
        corrections: Vec::new(),
        sweeps: 0,
    }
}

pub fn solve(n: u32, options: &SolveOptions) -> Result<Solution, SolveFailure> {
    if n < 2 {
        return Err(SolveFailure::Usage(format!(
            "target must be at least 2 (n = {n} leaves no decisions)"
        )));
    }
    let params = GameParams::new(n).map_err(|e| SolveFailure::Usage(e.to_string()))?;
    match options.method {
        Method::Iterative => {
            solve_iterative(params, options.epsilon, options.max_sweeps).map_err(|e| match e {
                IntervalError::NotConverged { .. } => SolveFailure::NotConverged(e),
                IntervalError::VerificationFailed(_) => SolveFailure::Budget(e.to_string()),
                IntervalError::TargetTooSmall(_) | IntervalError::Game(_) => {
                    SolveFailure::Usage(e.to_string())
                }
                IntervalError::Solve(_) => SolveFailure::Internal(e.to_string()),
            })
        }
        Method::Analytic => solve_analytic(params, options.budget)
            .map(solution_from_report)
            .map_err(|e| match e {
                AnalyticError::BudgetExceeded { .. } => SolveFailure::Budget(e.to_string()),
                AnalyticError::TargetTooSmall(_) | AnalyticError::Game(_) => {
                    SolveFailure::Usage(e.to_string())
                }
                _ => SolveFailure::Internal(e.to_string()),
            }),
    }
}
