//! Known values, cross-method agreement, and policy-file auditing.

use std::collections::BTreeMap;
use std::fmt::Write;

use riskgame_core::analysis::{p_all, p_split, ThresholdTable};
use riskgame_core::exact::ratio;
use riskgame_core::game::{Action, GameParams, Position};
use riskgame_core::interval::{evaluate_policy, Solution};
use riskgame_core::{BigRational, Policy};

use crate::document::{thresholds_grid, PolicyDocument};
use crate::solver::{solve, Method, SolveFailure, SolveOptions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    fn push(&mut self, name: impl Into<String>, expected: impl ToString, actual: impl ToString) {
        self.checks.push(Check {
            name: name.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    /// One line per check; failures show expected and actual.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            if c.passed() {
                writeln!(out, "ok    {} = {}", c.name, c.actual).unwrap();
            } else {
                writeln!(out, "FAIL  {}", c.name).unwrap();
                writeln!(out, "  - expected {}", c.expected).unwrap();
                writeln!(out, "  + actual   {}", c.actual).unwrap();
            }
        }
        let failed = self.failures().count();
        writeln!(out, "{} checks, {} failed", self.checks.len(), failed).unwrap();
        out
    }
}

const FIRST_PLAYER: [(u32, i64, i64); 5] = [
    (2, 4, 7),
    (3, 6, 11),
    (4, 2236, 4165),
    (5, 1026, 1925),
    (6, 275_848_876, 521_145_625),
];

/// Turn-start values for the three-point game, `(b, c, num, den)`.
const THREE_POINT_TURN_STARTS: [(u32, u32, i64, i64); 8] = [
    (2, 0, 8, 9),
    (1, 0, 8, 11),
    (2, 1, 4, 5),
    (2, 2, 2, 3),
    (1, 1, 4, 7),
    (1, 2, 2, 5),
    (0, 1, 4, 11),
    (0, 2, 2, 9),
];

fn p(a: u32, b: u32, c: u32) -> Position {
    Position::new(a, b, c)
}

fn with(params: GameParams, base: Action, changes: &[(Position, Action)]) -> Policy {
    let mut policy = Policy::uniform(params, base);
    for &(pos, action) in changes {
        policy.set(pos, action);
    }
    policy
}

fn value_under(policy: &Policy, pos: Position) -> Result<BigRational, SolveFailure> {
    let values = evaluate_policy(policy).map_err(|e| SolveFailure::Internal(e.to_string()))?;
    Ok(values.get(pos).expect("alive position").clone())
}

fn set_string(positions: impl IntoIterator<Item = Position>) -> String {
    let items: Vec<String> = positions.into_iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

/// Fixture suite plus analytic/iterative agreement for `2 ≤ n ≤ n_max`.
pub fn run_fixtures(n_max: u32, options: &SolveOptions) -> Result<VerifyReport, SolveFailure> {
    let mut report = VerifyReport::default();
    let iterative = SolveOptions {
        method: Method::Iterative,
        ..*options
    };
    let mut solved: BTreeMap<u32, Solution> = BTreeMap::new();
    for n in 2..=n_max.max(4) {
        solved.insert(n, solve(n, &iterative)?);
    }

    for (n, num, den) in FIRST_PLAYER {
        if n <= n_max.max(4) {
            report.push(
                format!("P(0,0,0) at n={n}"),
                ratio(num, den),
                &solved[&n].p_first,
            );
        }
    }

    let three = &solved[&3];
    for (b, c, num, den) in THREE_POINT_TURN_STARTS {
        let actual = three.values.get(Position::turn_start(b, c)).unwrap();
        report.push(format!("P(0,{b},{c}) at n=3"), ratio(num, den), actual);
    }
    report.push(
        "reachable stops at n=3",
        set_string([p(1, 0, 0)]),
        set_string(three.policy.reachable_new_stops()),
    );
    report.push(
        "reachable stops at n=4",
        set_string([p(1, 2, 0), p(2, 0, 0), p(2, 0, 2)]),
        set_string(solved[&4].policy.reachable_new_stops()),
    );
    for (pos, cont, stop) in [
        (p(1, 0, 0), (61, 99), (7, 11)),
        (p(1, 0, 2), (1, 3), (1, 5)),
    ] {
        let values = &three.values;
        report.push(
            format!("continue at {pos}, n=3"),
            ratio(cont.0, cont.1),
            values.continue_value(pos).unwrap(),
        );
        report.push(
            format!("stop at {pos}, n=3"),
            ratio(stop.0, stop.1),
            values.stop_value(pos).unwrap(),
        );
    }

    // Fixed strategies for the two-point game.
    let two = GameParams::new(2).unwrap();
    let always = with(two, Action::Continue, &[]);
    report.push(
        "all continue, P(0,0,0), n=2",
        ratio(4, 7),
        value_under(&always, p(0, 0, 0))?,
    );
    let bank_first = with(two, Action::Continue, &[(p(1, 0, 0), Action::Stop)]);
    report.push(
        "bank at (1, 0, 0), P(0,0,0), n=2",
        ratio(8, 15),
        value_under(&bank_first, p(0, 0, 0))?,
    );
    report.push(
        "bank at (1, 0, 0), P(0,0,1), n=2",
        ratio(2, 5),
        value_under(&bank_first, p(0, 0, 1))?,
    );
    let always_bank = with(two, Action::Stop, &[]);
    report.push(
        "always bank, P(0,0,1), n=2",
        ratio(2, 9),
        value_under(&always_bank, p(0, 0, 1))?,
    );

    // Branches of the three-point game away from the optimum.
    let optimal = &three.policy;
    let mut branch = optimal.clone();
    branch.set(p(1, 0, 0), Action::Continue);
    branch.set(p(2, 0, 0), Action::Continue);
    report.push(
        "V(1,0,0), continue twice, n=3",
        ratio(3, 5),
        value_under(&branch, p(1, 0, 0))?,
    );
    branch.set(p(2, 0, 0), Action::Stop);
    report.push(
        "V(1,0,0), continue then stop, n=3",
        ratio(13, 21),
        value_under(&branch, p(1, 0, 0))?,
    );
    let mut branch = optimal.clone();
    branch.set(p(1, 0, 2), Action::Stop);
    report.push(
        "bank at (1, 0, 2), P(0,0,2), n=3",
        ratio(2, 15),
        value_under(&branch, p(0, 0, 2))?,
    );

    for (r, num, den) in [(1, 2, 3), (2, 2, 5), (3, 2, 9)] {
        report.push(format!("p_all({r})"), ratio(num, den), p_all(r).unwrap());
    }
    for (r, x, num, den) in [(2, 1, 2, 9), (3, 1, 2, 15), (4, 2, 2, 25)] {
        report.push(
            format!("p_split({r}, {x})"),
            ratio(num, den),
            p_split(r, x).unwrap(),
        );
    }

    let analytic = SolveOptions {
        method: Method::Analytic,
        ..*options
    };
    for n in 2..=n_max {
        let a = PolicyDocument::from_solution(&solve(n, &analytic)?).to_canonical_json();
        let i = PolicyDocument::from_solution(&solved[&n]).to_canonical_json();
        report.push(
            format!("analytic = iterative document, n={n}"),
            "identical",
            first_difference(&a, &i),
        );
    }
    Ok(report)
}

/// `"identical"` or the first line where two texts part ways.
pub fn first_difference(left: &str, right: &str) -> String {
    let mut l = left.lines();
    let mut r = right.lines();
    for line in 1.. {
        match (l.next(), r.next()) {
            (None, None) => return "identical".to_owned(),
            (x, y) if x == y => continue,
            (x, y) => {
                return format!(
                    "line {line}: {:?} vs {:?}",
                    x.unwrap_or("<end>").trim(),
                    y.unwrap_or("<end>").trim()
                )
            }
        }
    }
    unreachable!()
}

/// Re-derive everything a policy file claims: values by solving its policy
/// exactly, optimality by a one-step audit, the threshold grid, and the
/// headline chance.
pub fn check_document(doc: &PolicyDocument) -> VerifyReport {
    let mut report = VerifyReport::default();
    let (policy, stated) = match doc.decode() {
        Ok(decoded) => decoded,
        Err(e) => {
            report.push("document structure", "well formed", format!("{e:#}"));
            return report;
        }
    };
    report.push("document structure", "well formed", "well formed");
    let exact = match evaluate_policy(&policy) {
        Ok(v) => v,
        Err(e) => {
            report.push("policy evaluation", "solvable", e);
            return report;
        }
    };
    let mut wrong = 0;
    for (pos, value) in exact.iter() {
        let claim = stated.get(pos).expect("decoded documents are complete");
        if claim != value {
            report.push(format!("value at {pos}"), value, claim);
            wrong += 1;
        }
    }
    let summary = match wrong {
        0 => "match the policy".to_owned(),
        k => format!("{k} positions differ"),
    };
    report.push("stated values", "match the policy", summary);
    let audit = exact.audit(&policy);
    report.push(
        "one-step optimality",
        "no improving flip",
        match audit.violations.as_slice() {
            [] => "no improving flip".to_owned(),
            v => format!("improving flip at {}", set_string(v.iter().copied())),
        },
    );
    let start = exact.get(Position::turn_start(0, 0)).unwrap();
    let stated_first = doc.p_first.to_rational().map(|v| v.to_string());
    report.push(
        "p_first",
        start,
        stated_first.unwrap_or_else(|e| format!("{e:#}")),
    );
    let flagged: Vec<Position> = doc
        .positions
        .iter()
        .filter(|e| e.tie)
        .map(|e| Position::new(e.a, e.b, e.c))
        .collect();
    report.push(
        "tie flags",
        set_string(audit.ties.iter().copied()),
        set_string(flagged),
    );
    let table = ThresholdTable::from_policy(&policy, &audit.ties);
    report.push(
        "threshold grid",
        format!("{:?}", thresholds_grid(&table)),
        format!("{:?}", doc.thresholds),
    );
    report
}

/// A policy file turned back into a solution, provided every check passes.
pub fn load_solution(doc: &PolicyDocument) -> Result<Solution, VerifyReport> {
    let report = check_document(doc);
    if !report.passed() {
        return Err(report);
    }
    let (policy, values) = doc.decode().expect("checked above");
    let ties = values.audit(&policy).ties;
    Ok(Solution {
        params: policy.params(),
        p_first: values.get(Position::turn_start(0, 0)).unwrap().clone(),
        policy,
        values,
        ties,
        corrections: Vec::new(),
        sweeps: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_pass() {
        let report = run_fixtures(3, &SolveOptions::default()).unwrap();
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn corrupted_document_fails() {
        let solution = solve(4, &SolveOptions::default()).unwrap();
        let mut doc = PolicyDocument::from_solution(&solution);
        assert!(check_document(&doc).passed());
        assert_eq!(load_solution(&doc).unwrap().values, solution.values);

        let entry = doc
            .positions
            .iter_mut()
            .find(|e| (e.a, e.b, e.c) == (2, 0, 0))
            .unwrap();
        entry.action = "continue".into();
        let report = check_document(&doc);
        assert!(!report.passed());
        assert!(report.render().contains("FAIL  one-step optimality"));
    }

    #[test]
    fn tampered_value_is_caught() {
        let solution = solve(3, &SolveOptions::default()).unwrap();
        let mut doc = PolicyDocument::from_solution(&solution);
        doc.positions[0].p.num = "1".into();
        doc.positions[0].p.den = "2".into();
        assert!(!check_document(&doc).passed());
    }

    #[test]
    fn differences() {
        assert_eq!(first_difference("a\nb\n", "a\nb\n"), "identical");
        assert_eq!(
            first_difference("a\nb\n", "a\nc\n"),
            "line 2: \"b\" vs \"c\""
        );
        assert_eq!(
            first_difference("a\n", "a\nc\n"),
            "line 2: \"<end>\" vs \"c\""
        );
    }
}
