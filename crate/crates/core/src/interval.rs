//! Interval value iteration.
//!
//! Every decision position carries a lower and an upper bound on the mover's
//! winning probability together with a label that starts out unknown. Turn
//! starts never need a cell of their own: eliminating the two forced-toss
//! equations of a pair of turn starts gives
//!
//! ```text
//! P(0,b,c) = 1/3 + 2/3·P(1,b,c) − 1/3·P(1,c,b)
//! ```
//!
//! so both action values at `(a,b,c)` can be written over `a ≥ 1` cells only:
//!
//! ```text
//! continue: 1/3 − 1/3·P(1,c,b)   + 1/6·P(1,b,c)   + 1/2·P(a+1,b,c)
//! stop:     2/3 − 2/3·P(1,c,a+b) + 1/3·P(1,a+b,c)
//! ```
//!
//! A label is fixed for good once the worst case of one action beats the best
//! case of the other by more than `epsilon`. Bounds run in `f64`; once every
//! label is fixed the policy is solved exactly and every decision is
//! re-checked in rational arithmetic, so float error can never leak into the
//! result.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::exact::{self, BigRational, LinearSystem};
use crate::game::{self, Action, GameParams, Position};
use crate::policy::{half, Policy, ValueMap};
use crate::{IntervalError, SolveError};

pub const DEFAULT_EPSILON: f64 = 1e-12;
pub const DEFAULT_MAX_SWEEPS: u32 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Unknown,
    Continue,
    Stop,
}

impl Label {
    pub fn action(self) -> Option<Action> {
        match self {
            Label::Unknown => None,
            Label::Continue => Some(Action::Continue),
            Label::Stop => Some(Action::Stop),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalCell {
    pub p_min: f64,
    pub p_max: f64,
    pub s: Label,
}

impl IntervalCell {
    const INITIAL: IntervalCell = IntervalCell {
        p_min: 0.0,
        p_max: 1.0,
        s: Label::Unknown,
    };

    /// A mover who has already reached the target.
    const WON: IntervalCell = IntervalCell {
        p_min: 1.0,
        p_max: 1.0,
        s: Label::Unknown,
    };
}

#[derive(Clone, Debug)]
pub struct IterationState {
    params: GameParams,
    cells: Vec<IntervalCell>,
    order: Vec<Position>,
    sweep_count: u32,
    undecided_count: usize,
    epsilon: f64,
}

impl IterationState {
    pub fn new(params: GameParams, epsilon: f64) -> Result<Self, IntervalError> {
        if params.n() < 2 {
            return Err(IntervalError::TargetTooSmall(params.n()));
        }
        let order = game::decision_positions(params);
        Ok(IterationState {
            params,
            cells: vec![IntervalCell::INITIAL; params.cube_len()],
            undecided_count: order.len(),
            order,
            sweep_count: 0,
            epsilon,
        })
    }

    pub fn params(&self) -> GameParams {
        self.params
    }

    pub fn sweep_count(&self) -> u32 {
        self.sweep_count
    }

    pub fn undecided_count(&self) -> usize {
        self.undecided_count
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Cell of an `a ≥ 1` position; positions with `a + b ≥ n` read as won.
    pub fn cell(&self, pos: Position) -> IntervalCell {
        debug_assert!(pos.a >= 1, "turn starts have no cell");
        if pos.a + pos.b >= self.params.n() {
            IntervalCell::WON
        } else {
            self.cells[self.params.index(pos)]
        }
    }

    fn lo(&self, a: u32, b: u32, c: u32) -> f64 {
        self.cell(Position::new(a, b, c)).p_min
    }

    fn hi(&self, a: u32, b: u32, c: u32) -> f64 {
        self.cell(Position::new(a, b, c)).p_max
    }

    /// Bounds on the value of tossing on at `pos`.
    pub fn continue_value_bounds(&self, pos: Position) -> (f64, f64) {
        let Position { a, b, c } = pos;
        let low = 1.0 / 3.0 - self.hi(1, c, b) / 3.0
            + self.lo(1, b, c) / 6.0
            + self.lo(a + 1, b, c) / 2.0;
        let high = 1.0 / 3.0 - self.lo(1, c, b) / 3.0
            + self.hi(1, b, c) / 6.0
            + self.hi(a + 1, b, c) / 2.0;
        (low, high)
    }

    /// Bounds on the value of banking at `pos`.
    pub fn stop_value_bounds(&self, pos: Position) -> (f64, f64) {
        let Position { a, b, c } = pos;
        let banked = a + b;
        let low = 2.0 / 3.0 - 2.0 * self.hi(1, c, banked) / 3.0 + self.lo(1, banked, c) / 3.0;
        let high = 2.0 / 3.0 - 2.0 * self.lo(1, c, banked) / 3.0 + self.hi(1, banked, c) / 3.0;
        (low, high)
    }

    /// Bounds on a turn start `(0, b, c)`.
    pub fn turn_start_bounds(&self, b: u32, c: u32) -> (f64, f64) {
        let low = 1.0 / 3.0 + 2.0 * self.lo(1, b, c) / 3.0 - self.hi(1, c, b) / 3.0;
        let high = 1.0 / 3.0 + 2.0 * self.hi(1, b, c) / 3.0 - self.lo(1, c, b) / 3.0;
        (low, high)
    }

    /// One Gauss–Seidel pass over the decision positions in sweep order.
    pub fn sweep(&mut self) {
        for k in 0..self.order.len() {
            let pos = self.order[k];
            let (cont_lo, cont_hi) = self.continue_value_bounds(pos);
            let (stop_lo, stop_hi) = self.stop_value_bounds(pos);
            let i = self.params.index(pos);
            let mut cell = self.cells[i];

            if cell.s == Label::Unknown {
                if cont_lo > stop_hi + self.epsilon {
                    cell.s = Label::Continue;
                } else if stop_lo > cont_hi + self.epsilon {
                    cell.s = Label::Stop;
                }
                if cell.s != Label::Unknown {
                    self.undecided_count -= 1;
                }
            }

            let (low, high) = match cell.s {
                Label::Unknown => (cont_lo.min(stop_lo), cont_hi.max(stop_hi)),
                Label::Continue => (cont_lo, cont_hi),
                Label::Stop => (stop_lo, stop_hi),
            };
            // Clamp so rounding can neither loosen a bound nor cross them.
            cell.p_min = cell.p_min.max(low.min(cell.p_max));
            cell.p_max = cell.p_max.min(high.max(cell.p_min));
            self.cells[i] = cell;
        }
        self.sweep_count += 1;
    }

    pub fn is_decided(&self) -> bool {
        self.undecided_count == 0
    }

    pub fn undecided(&self) -> Vec<Position> {
        self.order
            .iter()
            .copied()
            .filter(|&p| self.cell(p).s == Label::Unknown)
            .collect()
    }

    /// The labelled policy, once nothing is unknown.
    pub fn policy(&self) -> Option<Policy> {
        let mut policy = Policy::uniform(self.params, Action::Continue);
        for &pos in &self.order {
            policy.set(pos, self.cell(pos).s.action()?);
        }
        Some(policy)
    }
}

/// Converged policy with exact values for every alive position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub params: GameParams,
    pub policy: Policy,
    pub values: ValueMap,
    /// `P(0, 0, 0)`.
    pub p_first: BigRational,
    /// Decision positions where both actions are worth exactly the same;
    /// they are labelled [`Action::Stop`].
    pub ties: Vec<Position>,
    /// Float decisions overturned by the exact check, in the order applied.
    pub corrections: Vec<Position>,
    pub sweeps: u32,
}

impl Solution {
    pub fn n(&self) -> u32 {
        self.params.n()
    }

    pub fn is_tie(&self, pos: Position) -> bool {
        self.ties.contains(&pos)
    }
}

pub fn solve_iterative(
    params: GameParams,
    epsilon: f64,
    max_sweeps: u32,
) -> Result<Solution, IntervalError> {
    let mut state = IterationState::new(params, epsilon)?;
    while !state.is_decided() {
        if state.sweep_count() >= max_sweeps {
            return Err(IntervalError::NotConverged {
                sweeps: state.sweep_count(),
                undecided: state.undecided(),
            });
        }
        state.sweep();
    }
    let policy = state.policy().expect("every label decided");
    let mut solution = finalize(policy)?;
    solution.sweeps = state.sweep_count();
    Ok(solution)
}

/// Solve `policy` exactly and repair it until every decision is one-step
/// optimal in rational arithmetic. Each correction flips the first strictly
/// worse decision in sweep order and re-solves.
pub fn finalize(mut policy: Policy) -> Result<Solution, IntervalError> {
    let params = policy.params();
    let limit = 2 * game::decision_positions(params).len();
    let mut corrections = Vec::new();
    let values = loop {
        let values = evaluate_policy(&policy)?;
        let audit = values.audit(&policy);
        match audit.violations.first() {
            None => break values,
            Some(&pos) => {
                if corrections.len() >= limit {
                    return Err(IntervalError::VerificationFailed(corrections.len()));
                }
                policy.flip(pos);
                corrections.push(pos);
            }
        }
    };

    // A tie leaves the value map a fixed point of both actions.
    let ties = values.audit(&policy).ties;
    for &pos in &ties {
        policy.set(pos, Action::Stop);
    }

    let p_first = values
        .get(Position::turn_start(0, 0))
        .cloned()
        .expect("start position solved");
    Ok(Solution {
        params,
        policy,
        values,
        p_first,
        ties,
        corrections,
        sweeps: 0,
    })
}

/// The symmetric-play value equations of `policy` over every alive position.
///
/// Turn starts and tossing positions use `V = ½(1 − V(0,c,b)) + ½·V(a+1,b,c)`,
/// banking positions use `V = 1 − V(0,c,a+b)`; a mover at the target is worth 1.
pub fn policy_system(policy: &Policy) -> Result<LinearSystem<Position>, SolveError> {
    let params = policy.params();
    let n = params.n();
    let labels = game::positions_in_sweep_order(params);
    let mut slot = vec![usize::MAX; params.cube_len()];
    for (i, p) in labels.iter().enumerate() {
        slot[params.index(*p)] = i;
    }
    let mut system = LinearSystem::new(labels.clone())?;
    let one = BigRational::one();
    let half = half();

    for (row, &pos) in labels.iter().enumerate() {
        system.add_coefficient(row, row, one.clone());
        let tossing = pos.a == 0 || policy.action(pos) == Action::Continue;
        if tossing {
            // V + ½·V(0,c,b) − ½·V(a+1,b,c) = ½
            let pass = Position::turn_start(pos.c, pos.b);
            system.add_coefficient(row, slot[params.index(pass)], half.clone());
            system.add_rhs(row, half.clone());
            if pos.a + 1 + pos.b >= n {
                system.add_rhs(row, half.clone());
            } else {
                let heads = Position::new(pos.a + 1, pos.b, pos.c);
                system.add_coefficient(row, slot[params.index(heads)], -half.clone());
            }
        } else {
            // V + V(0,c,a+b) = 1
            let next = Position::turn_start(pos.c, pos.a + pos.b);
            system.add_coefficient(row, slot[params.index(next)], one.clone());
            system.add_rhs(row, one.clone());
        }
    }
    Ok(system)
}

/// Exact values of every alive position when both players follow `policy`.
pub fn evaluate_policy(policy: &Policy) -> Result<ValueMap, SolveError> {
    let system = policy_system(policy)?;
    let x = exact::solve_exact(&system)?;
    let mut values = ValueMap::new(policy.params());
    for (pos, v) in system.labels().iter().zip(x) {
        values.insert(*pos, v);
    }
    Ok(values)
}
