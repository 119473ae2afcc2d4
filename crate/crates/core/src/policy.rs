//! Dense containers keyed by [`Position`]: a stationary policy and an exact
//! value map, plus the one-step action values every solver shares.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::exact::BigRational;
use crate::game::{self, Action, GameParams, Position};

/// A pure stationary strategy: one [`Action`] per decision position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Policy {
    params: GameParams,
    actions: Vec<Option<Action>>,
}

impl Policy {
    /// Every decision position set to `action`.
    pub fn uniform(params: GameParams, action: Action) -> Self {
        let mut actions = vec![None; params.cube_len()];
        for pos in game::alive_positions(params) {
            if pos.a >= 1 {
                actions[params.index(pos)] = Some(action);
            }
        }
        Policy { params, actions }
    }

    pub fn params(&self) -> GameParams {
        self.params
    }

    /// `None` when `pos` is not a decision position.
    pub fn get(&self, pos: Position) -> Option<Action> {
        if !pos.is_decision(self.params) {
            return None;
        }
        self.actions[self.params.index(pos)]
    }

    /// Panics if `pos` is not a decision position.
    pub fn action(&self, pos: Position) -> Action {
        self.get(pos)
            .unwrap_or_else(|| panic!("{pos} is not a decision position"))
    }

    pub fn set(&mut self, pos: Position, action: Action) {
        assert!(
            pos.is_decision(self.params),
            "{pos} is not a decision position"
        );
        let i = self.params.index(pos);
        self.actions[i] = Some(action);
    }

    pub fn flip(&mut self, pos: Position) {
        let flipped = self.action(pos).flipped();
        self.set(pos, flipped);
    }

    /// Decision positions with their actions, in sweep order.
    pub fn iter(&self) -> impl Iterator<Item = (Position, Action)> + '_ {
        game::decision_positions(self.params)
            .into_iter()
            .map(move |p| (p, self.action(p)))
    }

    pub fn stop_set(&self) -> BTreeSet<Position> {
        self.iter()
            .filter(|&(_, a)| a == Action::Stop)
            .map(|(p, _)| p)
            .collect()
    }

    /// Positions reachable from `(0, 0, 0)` when both players follow this policy.
    pub fn reachable(&self) -> BTreeSet<Position> {
        let n = self.params.n();
        let mut seen = BTreeSet::new();
        let mut stack = vec![Position::turn_start(0, 0)];
        while let Some(pos) = stack.pop() {
            if !pos.is_alive(self.params) || !seen.insert(pos) {
                continue;
            }
            stack.push(Position::turn_start(pos.c, pos.b));
            let keep_tossing = pos.a == 0 || self.action(pos) == Action::Continue;
            if keep_tossing {
                if pos.a + 1 + pos.b < n {
                    stack.push(Position::new(pos.a + 1, pos.b, pos.c));
                }
            } else {
                stack.push(Position::turn_start(pos.c, pos.a + pos.b));
            }
        }
        seen
    }

    /// Stop positions among reachable new positions.
    pub fn reachable_new_stops(&self) -> BTreeSet<Position> {
        let reachable = self.reachable();
        self.stop_set()
            .into_iter()
            .filter(|p| p.is_new(self.params) && reachable.contains(p))
            .collect()
    }
}

/// Exact winning probabilities of the mover, keyed by position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValueMap {
    params: GameParams,
    values: Vec<Option<BigRational>>,
}

impl ValueMap {
    pub fn new(params: GameParams) -> Self {
        ValueMap {
            params,
            values: vec![None; params.cube_len()],
        }
    }

    pub fn params(&self) -> GameParams {
        self.params
    }

    pub fn insert(&mut self, pos: Position, value: BigRational) {
        assert!(pos.is_alive(self.params), "{pos} is not alive");
        let i = self.params.index(pos);
        self.values[i] = Some(value);
    }

    pub fn get(&self, pos: Position) -> Option<&BigRational> {
        if !pos.is_alive(self.params) {
            return None;
        }
        self.values[self.params.index(pos)].as_ref()
    }

    /// Like [`get`](Self::get) but a mover who has reached the target is worth 1.
    pub fn resolve(&self, pos: Position) -> Option<BigRational> {
        if pos.a + pos.b >= self.params.n() {
            return Some(BigRational::one());
        }
        self.get(pos).cloned()
    }

    /// Value of tossing at `pos`: `½(1 − V(0,c,b)) + ½·V(a+1,b,c)`.
    pub fn continue_value(&self, pos: Position) -> Option<BigRational> {
        let half = half();
        let pass = BigRational::one() - self.resolve(Position::turn_start(pos.c, pos.b))?;
        let heads = self.resolve(Position::new(pos.a + 1, pos.b, pos.c))?;
        Some(&half * pass + half * heads)
    }

    /// Value of banking at `pos`: `1 − V(0, c, a+b)`.
    pub fn stop_value(&self, pos: Position) -> Option<BigRational> {
        if pos.a + pos.b >= self.params.n() {
            return Some(BigRational::one());
        }
        Some(BigRational::one() - self.resolve(Position::turn_start(pos.c, pos.a + pos.b))?)
    }

    pub fn action_value(&self, pos: Position, action: Action) -> Option<BigRational> {
        match action {
            Action::Continue => self.continue_value(pos),
            Action::Stop => self.stop_value(pos),
        }
    }

    /// Iterate over stored values in `(b, c, a)` order.
    pub fn iter(&self) -> impl Iterator<Item = (Position, &BigRational)> + '_ {
        game::alive_positions(self.params)
            .into_iter()
            .filter_map(move |p| self.get(p).map(|v| (p, v)))
    }

    pub fn len(&self) -> usize {
        self.values.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.values.iter().all(Option::is_none)
    }

    pub fn is_complete(&self) -> bool {
        game::alive_positions(self.params)
            .into_iter()
            .all(|p| self.get(p).is_some())
    }

    /// Decision positions where the chosen action is strictly worse than the
    /// alternative, plus the positions where both are exactly equal.
    pub fn audit(&self, policy: &Policy) -> Audit {
        let mut audit = Audit::default();
        for (pos, chosen) in policy.iter() {
            let (Some(c), Some(s)) = (self.continue_value(pos), self.stop_value(pos)) else {
                continue;
            };
            let diff = match chosen {
                Action::Continue => c - s,
                Action::Stop => s - c,
            };
            if diff.is_zero() {
                audit.ties.push(pos);
            } else if diff < BigRational::zero() {
                audit.violations.push(pos);
            }
        }
        audit
    }
}

/// Result of [`ValueMap::audit`]; both lists are in sweep order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Audit {
    pub violations: Vec<Position>,
    pub ties: Vec<Position>,
}

pub(crate) fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}
