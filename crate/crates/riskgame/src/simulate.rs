//! Parallel Monte-Carlo estimates and NDJSON game traces.
//!
//! Game `i` always uses coin stream `i` of the run's seed, so the report does
//! not depend on how rayon splits the work.

use std::io::Write;

use rayon::prelude::*;
use riskgame_core::game::Outcome;
use riskgame_core::simulation::{
    play_seeded, play_winner, GameRecord, Player, PolicyPair, SeededCoins,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub trials: u64,
    pub wins_first: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl TrialReport {
    pub fn from_counts(trials: u64, wins_first: u64, seed: u64) -> Self {
        let estimate = wins_first as f64 / trials as f64;
        TrialReport {
            trials,
            wins_first,
            estimate,
            std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
            seed,
        }
    }

    /// Distance from `exact` in standard errors.
    pub fn z_score(&self, exact: f64) -> f64 {
        (self.estimate - exact).abs() / self.std_error
    }
}

/// Panics if `trials` is zero.
pub fn estimate(pair: &PolicyPair, trials: u64, seed: u64) -> TrialReport {
    assert!(trials >= 1, "at least one trial is needed");
    let wins_first = (0..trials)
        .into_par_iter()
        .filter(|&i| play_winner(pair, &mut SeededCoins::new(seed, i)) == Player::First)
        .count() as u64;
    TrialReport::from_counts(trials, wins_first, seed)
}

#[derive(Serialize)]
struct TraceLine<'a> {
    game: u64,
    step: usize,
    mover: &'a str,
    a: u32,
    b: u32,
    c: u32,
    action: &'a str,
    outcome: &'a str,
}

#[derive(Serialize)]
struct WinnerLine<'a> {
    game: u64,
    winner: &'a str,
}

fn player_name(p: Player) -> &'static str {
    match p {
        Player::First => "first",
        Player::Second => "second",
    }
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Toss(riskgame_core::Coin::Heads) => "heads",
        Outcome::Toss(riskgame_core::Coin::Tails) => "tails",
        Outcome::Banked => "banked",
    }
}

/// One JSON object per move, then one naming the winner.
pub fn write_trace(out: &mut impl Write, game: u64, record: &GameRecord) -> std::io::Result<()> {
    for (step, s) in record.trace.iter().enumerate() {
        let line = TraceLine {
            game,
            step,
            mover: player_name(s.mover),
            a: s.position.a,
            b: s.position.b,
            c: s.position.c,
            action: if s.position.a == 0 {
                "toss"
            } else {
                s.action.as_str()
            },
            outcome: outcome_name(s.outcome),
        };
        serde_json::to_writer(&mut *out, &line)?;
        out.write_all(b"\n")?;
    }
    let line = WinnerLine {
        game,
        winner: player_name(record.winner),
    };
    serde_json::to_writer(&mut *out, &line)?;
    out.write_all(b"\n")
}

pub fn write_traces(
    out: &mut impl Write,
    pair: &PolicyPair,
    games: u64,
    seed: u64,
) -> std::io::Result<()> {
    for game in 0..games {
        write_trace(out, game, &play_seeded(pair, seed, game))?;
    }
    Ok(())
}
