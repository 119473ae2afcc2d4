//! Closed-form all-in results and the "how many coins to toss" view of a
//! solved policy.
//!
//! Tables are indexed by needs: `r` is what the mover still has to bank and
//! `s` what the opponent has to bank, so cell `(r, s)` of a target-`n` table
//! describes positions `(a, n − r, n − s)` for `a = 1, …, r − 1`. Because the
//! game only depends on needs, a cell reads the same for every target that
//! contains it.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::exact::BigRational;
use crate::game::{Action, GameParams, Position};
use crate::interval::{self, Solution};
use crate::policy::Policy;
use crate::{AnalysisError, IntervalError};

fn house(r: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << r as usize)
}

/// Chance of banking `r` points in one streak before the opponent, who needs
/// a single point, scores: `2p / (1 + p)` with `p = 2^−r`.
pub fn p_all(r: u32) -> Result<BigRational, AnalysisError> {
    if r == 0 {
        return Err(AnalysisError::DomainError { r, x: 0 });
    }
    let p = house(r);
    Ok((&p + &p) / (BigRational::one() + p))
}

/// Same race when the mover first banks `x` points and then goes for the
/// remaining `r − x`.
pub fn p_split(r: u32, x: u32) -> Result<BigRational, AnalysisError> {
    if x == 0 || x >= r {
        return Err(AnalysisError::DomainError { r, x });
    }
    let px = house(x);
    let py = house(r - x);
    let first = (&px + &px) / (BigRational::one() + px);
    let second = &py / (BigRational::one() + &py);
    Ok(first * second)
}

/// `p_split(r, x) < p_all(r)` rearranged: `(1 + p_x)(1 + p_{r−x}) > 1 + p_r`.
pub fn split_identity_holds(r: u32, x: u32) -> Result<bool, AnalysisError> {
    if x == 0 || x >= r {
        return Err(AnalysisError::DomainError { r, x });
    }
    let one = BigRational::one();
    let lhs = (&one + house(x)) * (&one + house(r - x));
    Ok(lhs > one + house(r))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllInReport {
    pub r: u32,
    pub p_all: BigRational,
    pub splits: Vec<(u32, BigRational)>,
    pub dominance_holds: bool,
}

pub fn all_in_report(r: u32) -> Result<AllInReport, AnalysisError> {
    let p_all = p_all(r)?;
    let splits = (1..r)
        .map(|x| p_split(r, x).map(|p| (x, p)))
        .collect::<Result<Vec<_>, _>>()?;
    let dominance_holds = splits.iter().all(|(_, p)| *p < p_all);
    Ok(AllInReport {
        r,
        p_all,
        splits,
        dominance_holds,
    })
}

/// A row where Continue reappears after the first Stop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThresholdViolation {
    pub r: u32,
    pub s: u32,
    pub threshold: u32,
    pub continue_at: u32,
}

/// Heads to collect before banking, for every `2 ≤ r, s ≤ n`. A value of `r`
/// means "go all in".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThresholdTable {
    n: u32,
    entries: Vec<u32>,
    ties: Vec<bool>,
    violations: Vec<ThresholdViolation>,
}

fn row_threshold(policy: &Policy, r: u32, s: u32) -> (u32, Option<u32>) {
    let n = policy.params().n();
    let at = |a| Position::new(a, n - r, n - s);
    let t = (1..r)
        .find(|&a| policy.action(at(a)) == Action::Stop)
        .unwrap_or(r);
    let relapse = (t + 1..r).find(|&a| policy.action(at(a)) == Action::Continue);
    (t, relapse)
}

impl ThresholdTable {
    /// `ties` lists positions where both actions are exactly equal; a cell is
    /// flagged when one of them lies at or before its threshold.
    pub fn from_policy(policy: &Policy, ties: &[Position]) -> Self {
        let n = policy.params().n();
        let side = (n - 1) as usize;
        let mut table = ThresholdTable {
            n,
            entries: Vec::with_capacity(side * side),
            ties: Vec::with_capacity(side * side),
            violations: Vec::new(),
        };
        for r in 2..=n {
            for s in 2..=n {
                let (t, relapse) = row_threshold(policy, r, s);
                if let Some(a) = relapse {
                    table.violations.push(ThresholdViolation {
                        r,
                        s,
                        threshold: t,
                        continue_at: a,
                    });
                }
                let tied = ties
                    .iter()
                    .any(|p| p.b == n - r && p.c == n - s && p.a <= t);
                table.entries.push(t);
                table.ties.push(tied);
            }
        }
        table
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    fn slot(&self, r: u32, s: u32) -> Option<usize> {
        let range = 2..=self.n;
        (range.contains(&r) && range.contains(&s))
            .then(|| ((r - 2) * (self.n - 1) + (s - 2)) as usize)
    }

    pub fn get(&self, r: u32, s: u32) -> Option<u32> {
        self.slot(r, s).map(|i| self.entries[i])
    }

    pub fn is_tie(&self, r: u32, s: u32) -> bool {
        self.slot(r, s).is_some_and(|i| self.ties[i])
    }

    /// Row `r` for `s = 2, …, n`.
    pub fn row(&self, r: u32) -> &[u32] {
        let side = (self.n - 1) as usize;
        let start = (r as usize - 2) * side;
        &self.entries[start..start + side]
    }

    /// Rows `r = 2, …, n`.
    pub fn rows(&self) -> impl Iterator<Item = &[u32]> + '_ {
        self.entries.chunks((self.n - 1) as usize)
    }

    pub fn violations(&self) -> &[ThresholdViolation] {
        &self.violations
    }
}

pub fn extract_thresholds(solution: &Solution) -> ThresholdTable {
    ThresholdTable::from_policy(&solution.policy, &solution.ties)
}

/// The two edges left out of the table: when the opponent needs one point
/// (`s = 1`) and when the mover does (`r = 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialRows {
    /// `(r, t)` for `s = 1`, `r = 1, …, n`.
    pub opponent_needs_one: Vec<(u32, u32)>,
    /// Every decision with `s = 1` is Continue.
    pub all_in: bool,
    /// Decision positions with `r = 1`; always zero.
    pub mover_needs_one_decisions: usize,
}

pub fn special_rows(policy: &Policy) -> SpecialRows {
    let params = policy.params();
    let n = params.n();
    let opponent_needs_one: Vec<(u32, u32)> = (1..=n)
        .map(|r| (r, row_threshold(policy, r, 1).0))
        .collect();
    let all_in = opponent_needs_one.iter().all(|&(r, t)| r == t)
        && (1..=n).all(|r| row_threshold(policy, r, 1).1.is_none());
    let mover_needs_one_decisions = (0..n)
        .flat_map(|c| (1..n).map(move |a| Position::new(a, n - 1, c)))
        .filter(|p| p.is_decision(params))
        .count();
    SpecialRows {
        opponent_needs_one,
        all_in,
        mover_needs_one_decisions,
    }
}

/// Exact first-player winning chances for `n = 2, …, max_n`, in lowest terms.
pub fn oeis_export(max_n: u32) -> Result<Vec<(u32, BigInt, BigInt)>, IntervalError> {
    (2..=max_n)
        .map(|n| {
            let solution = interval::solve_iterative(
                GameParams::new(n)?,
                interval::DEFAULT_EPSILON,
                interval::DEFAULT_MAX_SWEEPS,
            )?;
            let p = solution.p_first;
            Ok((n, p.numer().clone(), p.denom().clone()))
        })
        .collect()
}

/// One `n numerator denominator` line per entry.
pub fn format_fractions(rows: &[(u32, BigInt, BigInt)]) -> String {
    let mut out = String::new();
    for (n, num, den) in rows {
        out.push_str(&format!("{n} {num} {den}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::interval::{solve_iterative, DEFAULT_EPSILON, DEFAULT_MAX_SWEEPS};

    fn solve(n: u32) -> Solution {
        solve_iterative(
            GameParams::new(n).unwrap(),
            DEFAULT_EPSILON,
            DEFAULT_MAX_SWEEPS,
        )
        .unwrap()
    }

    #[test]
    fn all_in_values() {
        assert_eq!(p_all(1).unwrap(), ratio(2, 3));
        assert_eq!(p_all(2).unwrap(), ratio(2, 5));
        assert_eq!(p_all(3).unwrap(), ratio(2, 9));
        assert!(p_all(0).is_err());
    }

    #[test]
    fn split_values() {
        assert_eq!(p_split(2, 1).unwrap(), ratio(2, 9));
        assert_eq!(p_split(3, 1).unwrap(), ratio(2, 15));
        assert_eq!(p_split(4, 2).unwrap(), ratio(2, 25));
        assert_eq!(
            p_split(3, 0),
            Err(AnalysisError::DomainError { r: 3, x: 0 })
        );
        assert_eq!(
            p_split(3, 3),
            Err(AnalysisError::DomainError { r: 3, x: 3 })
        );
    }

    #[test]
    fn dominance_and_identity() {
        for r in 2..=30 {
            let report = all_in_report(r).unwrap();
            assert!(report.dominance_holds, "r = {r}");
            assert_eq!(report.splits.len(), (r - 1) as usize);
            for x in 1..r {
                assert!(split_identity_holds(r, x).unwrap());
            }
        }
    }

    #[test]
    fn small_tables() {
        // n = 3: stop after one head at (1,0,0), i.e. r = s = 3.
        let t = extract_thresholds(&solve(3));
        assert_eq!(t.rows().collect::<Vec<_>>(), [&[2, 2][..], &[3, 1][..]]);
        assert!(t.violations().is_empty());
        assert_eq!(t.get(4, 2), None);
        assert_eq!(t.get(1, 2), None);
    }

    #[test]
    fn table_five_is_corner_of_larger_tables() {
        let five = extract_thresholds(&solve(5));
        let eight = extract_thresholds(&solve(8));
        for r in 2..=5 {
            for s in 2..=5 {
                assert_eq!(five.get(r, s), eight.get(r, s), "({r}, {s})");
            }
        }
        assert_eq!(five.row(2), [2, 2, 1, 1]);
        assert_eq!(five.row(3), [3, 1, 1, 1]);
        assert_eq!(five.row(4), [2, 2, 2, 1]);
        assert_eq!(five.row(5), [2, 2, 2, 2]);
    }

    #[test]
    fn opponent_needing_one_means_all_in() {
        for n in 2..=8 {
            let rows = special_rows(&solve(n).policy);
            assert!(rows.all_in, "n = {n}");
            assert_eq!(rows.mover_needs_one_decisions, 0);
            assert_eq!(rows.opponent_needs_one.len(), n as usize);
        }
    }

    #[test]
    fn violations_are_reported() {
        let mut policy = solve(4).policy;
        // r = 4, s = 4 stops at a = 2; force a Continue at a = 3.
        policy.set(Position::new(3, 0, 0), Action::Continue);
        let t = ThresholdTable::from_policy(&policy, &[]);
        assert_eq!(
            t.violations(),
            [ThresholdViolation {
                r: 4,
                s: 4,
                threshold: 2,
                continue_at: 3
            }]
        );
    }

    #[test]
    fn export_small() {
        let rows = oeis_export(4).unwrap();
        assert_eq!(format_fractions(&rows), "2 4 7\n3 6 11\n4 2236 4165\n");
    }
}
