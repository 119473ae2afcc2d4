//! JSON documents: the solved policy file and the per-position answer served
//! to the UI.
//!
//! Fractions travel as decimal strings so nothing is lost in JSON; the
//! `approx` field is only there for people reading the file. Documents are
//! written canonically (sorted keys, two-space indent, LF, trailing newline),
//! so solving the same target twice gives the same bytes.

use std::str::FromStr;

use anyhow::{bail, ensure, Context};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use riskgame_core::analysis::ThresholdTable;
use riskgame_core::exact::approx;
use riskgame_core::game::{self, Action, GameParams, Position};
use riskgame_core::interval::Solution;
use riskgame_core::{BigRational, Policy, ValueMap};
use serde::{Deserialize, Serialize};

pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fraction {
    pub num: String,
    pub den: String,
    pub approx: f64,
}

impl From<&BigRational> for Fraction {
    fn from(value: &BigRational) -> Self {
        Fraction {
            num: value.numer().to_string(),
            den: value.denom().to_string(),
            approx: approx(value),
        }
    }
}

impl Fraction {
    /// Parses the exact part; rejects zero denominators and fractions that
    /// are not in lowest terms.
    pub fn to_rational(&self) -> anyhow::Result<BigRational> {
        let num =
            BigInt::from_str(&self.num).with_context(|| format!("bad numerator {:?}", self.num))?;
        let den = BigInt::from_str(&self.den)
            .with_context(|| format!("bad denominator {:?}", self.den))?;
        ensure!(den.is_positive(), "denominator {den} must be positive");
        let value = BigRational::new(num.clone(), den.clone());
        ensure!(
            *value.numer() == num && *value.denom() == den,
            "{num}/{den} is not in lowest terms"
        );
        Ok(value)
    }
}

impl std::fmt::Display for Fraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositionEntry {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    /// `"continue"`, `"stop"`, or `"toss"` at the start of a turn.
    pub action: String,
    pub p: Fraction,
    pub tie: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyDocument {
    pub version: u32,
    pub n: u32,
    pub p_first: Fraction,
    pub positions: Vec<PositionEntry>,
    pub thresholds: Vec<Vec<u32>>,
}

pub fn action_name(pos: Position, policy: &Policy) -> &'static str {
    if pos.a == 0 {
        "toss"
    } else {
        policy.action(pos).as_str()
    }
}

pub fn thresholds_grid(table: &ThresholdTable) -> Vec<Vec<u32>> {
    table.rows().map(<[u32]>::to_vec).collect()
}

impl PolicyDocument {
    pub fn from_solution(solution: &Solution) -> Self {
        let positions = game::positions_in_sweep_order(solution.params)
            .into_iter()
            .map(|pos| PositionEntry {
                a: pos.a,
                b: pos.b,
                c: pos.c,
                action: action_name(pos, &solution.policy).to_owned(),
                p: Fraction::from(solution.values.get(pos).expect("complete value map")),
                tie: solution.is_tie(pos),
            })
            .collect();
        let table = ThresholdTable::from_policy(&solution.policy, &solution.ties);
        PolicyDocument {
            version: VERSION,
            n: solution.n(),
            p_first: Fraction::from(&solution.p_first),
            positions,
            thresholds: thresholds_grid(&table),
        }
    }

    pub fn to_canonical_json(&self) -> String {
        to_canonical_json(self)
    }

    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let doc: PolicyDocument = serde_json::from_str(text).context("not a policy document")?;
        ensure!(
            doc.version == VERSION,
            "unsupported document version {}",
            doc.version
        );
        Ok(doc)
    }

    pub fn params(&self) -> anyhow::Result<GameParams> {
        Ok(GameParams::new(self.n)?)
    }

    /// Rebuild the policy and the stated values, checking the shape of the
    /// document (every alive position once, in order, with a legal action).
    pub fn decode(&self) -> anyhow::Result<(Policy, ValueMap)> {
        let params = self.params()?;
        let expected = game::positions_in_sweep_order(params);
        ensure!(
            expected.len() == self.positions.len(),
            "expected {} positions, found {}",
            expected.len(),
            self.positions.len()
        );
        let mut policy = Policy::uniform(params, Action::Continue);
        let mut values = ValueMap::new(params);
        for (want, entry) in expected.iter().zip(&self.positions) {
            let pos = Position::new(entry.a, entry.b, entry.c);
            ensure!(pos == *want, "position {pos} out of order, expected {want}");
            match (pos.a, entry.action.as_str()) {
                (0, "toss") => {}
                (0, other) => bail!("{pos}: turn start must be \"toss\", found {other:?}"),
                (_, "continue") => policy.set(pos, Action::Continue),
                (_, "stop") => policy.set(pos, Action::Stop),
                (_, other) => bail!("{pos}: unknown action {other:?}"),
            }
            let p = entry
                .p
                .to_rational()
                .with_context(|| format!("value at {pos}"))?;
            ensure!(
                p > BigRational::zero() && p < BigRational::one(),
                "{pos}: value {} is not a probability strictly between 0 and 1",
                entry.p
            );
            values.insert(pos, p);
        }
        Ok((policy, values))
    }
}

/// Everything the advisor needs about one position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateAnswer {
    pub n: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub legal_actions: Vec<String>,
    pub recommended: String,
    pub p_win: Fraction,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_if_continue: Option<Fraction>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_if_stop: Option<Fraction>,
}

impl StateAnswer {
    /// `None` when `pos` is not alive for this target.
    pub fn new(solution: &Solution, pos: Position) -> Option<Self> {
        let p_win = solution.values.get(pos)?;
        let decision = pos.a >= 1;
        let legal_actions = if decision {
            vec!["continue".to_owned(), "stop".to_owned()]
        } else {
            vec!["toss".to_owned()]
        };
        let (p_if_continue, p_if_stop) = if decision {
            (
                solution
                    .values
                    .continue_value(pos)
                    .as_ref()
                    .map(Fraction::from),
                solution.values.stop_value(pos).as_ref().map(Fraction::from),
            )
        } else {
            (None, None)
        };
        Some(StateAnswer {
            n: solution.n(),
            a: pos.a,
            b: pos.b,
            c: pos.c,
            legal_actions,
            recommended: action_name(pos, &solution.policy).to_owned(),
            p_win: Fraction::from(p_win),
            p_if_continue,
            p_if_stop,
        })
    }
}

/// Sorted keys, pretty printed, newline terminated.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    // serde_json::Value keeps object keys in a BTreeMap, which sorts them.
    let value = serde_json::to_value(value).expect("documents always serialize");
    let mut text = serde_json::to_string_pretty(&value).expect("values always serialize");
    text.push('\n');
    text
}
