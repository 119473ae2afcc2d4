//! Strategy enumeration with exact evaluation.
//!
//! Targets are solved bottom-up. At target `n`, every position in which both
//! players have banked something is equivalent (same needs) to a position of
//! target `n − 1`, so its value and decision are copied from there and never
//! enumerated. What remains are the *new* positions, `n(3n − 1)/2` of them.
//!
//! Banking only ever moves play to a pair of scores with a larger total, so
//! the new positions split into components `{(0,k), (k,0)}` that can be
//! settled from `k = n − 1` down to `k = 0`. Within a component every joint
//! assignment of its decisions is evaluated exactly; the optimum is the
//! assignment in which no decision can be improved by switching, which is
//! what both players settle on when each maximises their own chances.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::One;

use crate::exact::{BigRational, LinearSystem};
use crate::game::{self, Action, GameParams, NeedsView, Position};
use crate::policy::{half, Policy, ValueMap};
use crate::AnalyticError;

pub const DEFAULT_BUDGET: u64 = 100_000;

/// Decisions for every decision position of one target. Only the entries at
/// new positions are read by [`build_equations`]; reduced positions take
/// their values from the known map.
pub type StrategyAssignment = Policy;

/// Values of already-solved smaller targets, keyed by needs.
pub type KnownValues = BTreeMap<NeedsView, BigRational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyReport {
    pub params: GameParams,
    pub optimal: Policy,
    /// Exact values of every alive position of the target.
    pub values: ValueMap,
    /// Strategy evaluations (exact solves) performed at this target.
    pub strategies_compared: u64,
    /// Evaluations per target, smallest first, including this one.
    pub compared_by_target: Vec<(u32, u64)>,
    pub strategies_total_note: String,
    /// Decision positions where both actions are worth the same; set to stop.
    pub ties: Vec<Position>,
}

impl StrategyReport {
    pub fn p_first(&self) -> &BigRational {
        self.values
            .get(Position::turn_start(0, 0))
            .expect("start position solved")
    }
}

/// One equation per new position of the strategy's target.
pub fn build_equations(
    strategy: &StrategyAssignment,
    known: &KnownValues,
) -> Result<LinearSystem<Position>, AnalyticError> {
    let params = strategy.params();
    let n = params.n();
    let labels = game::new_positions(params);
    let slots: BTreeMap<Position, usize> =
        labels.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let mut system = LinearSystem::new(labels.clone())?;
    let one = BigRational::one();

    // coefficient · V(target) on the left-hand side of `row`
    let add_term = |system: &mut LinearSystem<Position>,
                    row: usize,
                    coefficient: BigRational,
                    target: Position|
     -> Result<(), AnalyticError> {
        if target.a + target.b >= n {
            system.add_rhs(row, -coefficient);
        } else if let Some(&col) = slots.get(&target) {
            system.add_coefficient(row, col, coefficient);
        } else {
            let view = game::needs_view(target, params)?;
            let value = known
                .get(&view)
                .ok_or(AnalyticError::MissingKnownValue(target))?;
            system.add_rhs(row, -(coefficient * value));
        }
        Ok(())
    };

    for (row, &pos) in labels.iter().enumerate() {
        system.add_coefficient(row, row, one.clone());
        let tossing = pos.a == 0 || strategy.action(pos) == Action::Continue;
        if tossing {
            // V = ½(1 − V(0,c,b)) + ½·V(a+1,b,c)
            system.add_rhs(row, half());
            add_term(&mut system, row, half(), Position::turn_start(pos.c, pos.b))?;
            add_term(
                &mut system,
                row,
                -half(),
                Position::new(pos.a + 1, pos.b, pos.c),
            )?;
        } else {
            // V = 1 − V(0,c,a+b)
            system.add_rhs(row, one.clone());
            add_term(
                &mut system,
                row,
                one.clone(),
                Position::turn_start(pos.c, pos.a + pos.b),
            )?;
        }
    }
    Ok(system)
}

/// Exact value of every new position when both players follow `strategy`.
pub fn evaluate_strategy(
    strategy: &StrategyAssignment,
    known: &KnownValues,
) -> Result<BTreeMap<Position, BigRational>, AnalyticError> {
    Ok(build_equations(strategy, known)?.solve_labelled()?)
}

/// Full value map of a target: new positions from `new_values`, the rest from `known`.
fn assemble(
    params: GameParams,
    new_values: &BTreeMap<Position, BigRational>,
    known: &KnownValues,
) -> Result<ValueMap, AnalyticError> {
    let mut values = ValueMap::new(params);
    for pos in game::alive_positions(params) {
        let value = match new_values.get(&pos) {
            Some(v) => v.clone(),
            None => known
                .get(&game::needs_view(pos, params)?)
                .cloned()
                .ok_or(AnalyticError::MissingKnownValue(pos))?,
        };
        values.insert(pos, value);
    }
    Ok(values)
}

/// New decision positions whose saved scores are `{0, k}`, in sweep order.
fn component(params: GameParams, k: u32) -> Vec<Position> {
    game::decision_positions(params)
        .into_iter()
        .filter(|p| (p.b == 0 && p.c == k) || (p.b == k && p.c == 0))
        .collect()
}

pub fn solve_analytic(params: GameParams, budget: u64) -> Result<StrategyReport, AnalyticError> {
    let n = params.n();
    if n < 2 {
        return Err(AnalyticError::TargetTooSmall(n));
    }

    let mut known = KnownValues::new();
    let mut decided: BTreeMap<NeedsView, Action> = BTreeMap::new();
    let mut compared_by_target = Vec::new();
    let mut spent = 0u64;
    let mut last = None;

    for m in 1..=n {
        let target = GameParams::new(m)?;
        let mut strategy = Policy::uniform(target, Action::Continue);
        for pos in game::decision_positions(target) {
            if !pos.is_new(target) {
                strategy.set(pos, decided[&game::needs_view(pos, target)?]);
            }
        }

        let mut compared = 0u64;
        let mut ties = Vec::new();
        for k in (0..m).rev() {
            let decisions = component(target, k);
            let count = 1u64 << decisions.len();
            if spent + count > budget {
                return Err(AnalyticError::BudgetExceeded {
                    needed: spent + count,
                    budget,
                });
            }
            spent += count;
            compared += count;

            let mut optimum: Option<(u64, ValueMap)> = None;
            for mask in 0..count {
                for (bit, &pos) in decisions.iter().enumerate() {
                    let action = if mask >> bit & 1 == 1 {
                        Action::Stop
                    } else {
                        Action::Continue
                    };
                    strategy.set(pos, action);
                }
                let values = assemble(target, &evaluate_strategy(&strategy, &known)?, &known)?;
                let audit = values.audit(&strategy);
                if !decisions.iter().any(|p| audit.violations.contains(p)) {
                    match &optimum {
                        None => optimum = Some((mask, values)),
                        // Equilibrium values are unique; a second equilibrium
                        // can only differ at ties.
                        Some((_, first)) => debug_assert_eq!(first, &values),
                    }
                }
            }
            let Some((mask, values)) = optimum else {
                return Err(AnalyticError::NoEquilibrium(decisions[0]));
            };
            for (bit, &pos) in decisions.iter().enumerate() {
                let action = if mask >> bit & 1 == 1 {
                    Action::Stop
                } else {
                    Action::Continue
                };
                strategy.set(pos, action);
            }
            for pos in values.audit(&strategy).ties {
                if decisions.contains(&pos) {
                    strategy.set(pos, Action::Stop);
                    ties.push(pos);
                }
            }
        }

        let values = assemble(target, &evaluate_strategy(&strategy, &known)?, &known)?;
        for (pos, v) in values.iter() {
            known.insert(game::needs_view(pos, target)?, v.clone());
        }
        for (pos, action) in strategy.iter() {
            decided.insert(game::needs_view(pos, target)?, action);
        }
        // ties inherited from smaller targets
        for pos in values.audit(&strategy).ties {
            if !ties.contains(&pos) {
                ties.push(pos);
            }
        }
        ties.sort_by_key(game::sweep_key);
        compared_by_target.push((m, compared));
        last = Some((strategy, values, compared, ties));
    }

    let (optimal, values, compared, ties) = last.expect("n >= 2");
    Ok(StrategyReport {
        params,
        optimal,
        values,
        strategies_compared: compared,
        compared_by_target,
        strategies_total_note: format!(
            "{compared} joint assignments evaluated at n = {n}: all assignments of each \
             component of new positions, with reduced positions fixed from n = {}; \
             the census of all strategies is not computed",
            n - 1
        ),
        ties,
    })
}

/// Needs-keyed values of every alive position of a solved target.
pub fn known_values(values: &ValueMap) -> KnownValues {
    let params = values.params();
    values
        .iter()
        .map(|(p, v)| (game::needs_view(p, params).expect("alive"), v.clone()))
        .collect()
}

/// Exact solve of a raw policy through [`build_equations`], for callers that
/// already have the smaller target's values.
pub fn evaluate_with_known(
    strategy: &StrategyAssignment,
    known: &KnownValues,
) -> Result<ValueMap, AnalyticError> {
    assemble(
        strategy.params(),
        &evaluate_strategy(strategy, known)?,
        known,
    )
}
