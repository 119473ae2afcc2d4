//! Independent checks on solved policies: exact evaluation of arbitrary
//! (possibly different) strategies for the two players, and seeded play.
//!
//! Unlike the solvers, which exploit the `p → 1 − p` symmetry between the
//! two players, the evaluator here tracks who is to move explicitly and
//! computes the first player's winning probability over the absorbing chain
//! of `(mover, a, b, c)` states.
//!
//! Random games draw coins from ChaCha8. Game `i` of a run seeded with `s`
//! uses the generator `ChaCha8Rng::seed_from_u64(s)` switched to stream `i`,
//! so every game is reproducible on its own and a run gives the same result
//! however the games are spread over threads.

use alloc::vec::Vec;

use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::exact::{self, BigRational, LinearSystem};
use crate::game::{self, Action, Coin, GameParams, Outcome, Position, Terminal};
use crate::policy::{half, Policy};
use crate::{GameError, SolveError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    First,
    Second,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::First => Player::Second,
            Player::Second => Player::First,
        }
    }
}

/// One strategy per player, for the same target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolicyPair {
    first: Policy,
    second: Policy,
}

impl PolicyPair {
    pub fn new(first: Policy, second: Policy) -> Result<Self, GameError> {
        if first.params() != second.params() {
            return Err(GameError::InvalidTarget(second.params().n()));
        }
        Ok(PolicyPair { first, second })
    }

    /// Both players follow `policy`.
    pub fn symmetric(policy: Policy) -> Self {
        PolicyPair {
            second: policy.clone(),
            first: policy,
        }
    }

    pub fn params(&self) -> GameParams {
        self.first.params()
    }

    pub fn policy(&self, player: Player) -> &Policy {
        match player {
            Player::First => &self.first,
            Player::Second => &self.second,
        }
    }

    pub fn policy_mut(&mut self, player: Player) -> &mut Policy {
        match player {
            Player::First => &mut self.first,
            Player::Second => &mut self.second,
        }
    }
}

/// Probability that the first player wins a game started by the first player.
pub fn exact_pair_value(pair: &PolicyPair) -> Result<BigRational, SolveError> {
    exact_pair_value_from(pair, Player::First, Position::turn_start(0, 0))
}

/// Probability that the first player wins from `start`, with `mover` to act
/// and `start` written from the mover's perspective.
pub fn exact_pair_value_from(
    pair: &PolicyPair,
    mover: Player,
    start: Position,
) -> Result<BigRational, SolveError> {
    let params = pair.params();
    let n = params.n();
    if !start.is_alive(params) {
        return Err(SolveError::Malformed("start position is not alive"));
    }
    let positions = game::alive_positions(params);
    let cube = params.cube_len();
    let slot = |player: Player, p: Position| match player {
        Player::First => params.index(p),
        Player::Second => cube + params.index(p),
    };

    // Labels live on a 2·n³ grid; dead grid points become trivial rows x = 0.
    let labels: Vec<(Player, Position)> = [Player::First, Player::Second]
        .into_iter()
        .flat_map(|pl| {
            (0..cube).map(move |i| {
                let n = n as usize;
                let a = (i % n) as u32;
                let c = ((i / n) % n) as u32;
                let b = (i / (n * n)) as u32;
                (pl, Position::new(a, b, c))
            })
        })
        .collect();
    let mut system = LinearSystem::new(labels)?;
    for row in 0..2 * cube {
        system.add_coefficient(row, row, BigRational::one());
    }

    for player in [Player::First, Player::Second] {
        let first_wins = if player == Player::First {
            BigRational::one()
        } else {
            BigRational::zero()
        };
        for &pos in &positions {
            let row = slot(player, pos);
            let tossing = pos.a == 0 || pair.policy(player).action(pos) == Action::Continue;
            if tossing {
                let pass = Position::turn_start(pos.c, pos.b);
                system.add_coefficient(row, slot(player.other(), pass), -half());
                if pos.a + 1 + pos.b >= n {
                    system.add_rhs(row, half() * &first_wins);
                } else {
                    let heads = Position::new(pos.a + 1, pos.b, pos.c);
                    system.add_coefficient(row, slot(player, heads), -half());
                }
            } else {
                let banked = Position::turn_start(pos.c, pos.a + pos.b);
                system.add_coefficient(row, slot(player.other(), banked), -BigRational::one());
            }
        }
    }

    let x = exact::solve_exact(&system)?;
    Ok(x[slot(mover, start)].clone())
}

/// Where the coins come from.
pub trait CoinSource {
    fn toss(&mut self) -> Coin;
}

/// Portable seeded coins; see the module docs for the stream rule.
#[derive(Clone, Debug)]
pub struct SeededCoins {
    rng: ChaCha8Rng,
}

impl SeededCoins {
    pub fn new(seed: u64, game_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(game_index);
        SeededCoins { rng }
    }
}

impl CoinSource for SeededCoins {
    fn toss(&mut self) -> Coin {
        if self.rng.next_u32() & 1 == 1 {
            Coin::Heads
        } else {
            Coin::Tails
        }
    }
}

/// A fixed sequence of outcomes. Panics when the script runs out.
#[derive(Clone, Debug)]
pub struct ScriptedCoins<I> {
    coins: I,
}

impl<I: Iterator<Item = Coin>> ScriptedCoins<I> {
    pub fn new(coins: impl IntoIterator<IntoIter = I>) -> Self {
        ScriptedCoins {
            coins: coins.into_iter(),
        }
    }
}

impl<I: Iterator<Item = Coin>> CoinSource for ScriptedCoins<I> {
    fn toss(&mut self) -> Coin {
        self.coins.next().expect("coin script exhausted")
    }
}

/// One move: `position` is seen from `mover`; turn starts record a forced
/// [`Action::Continue`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TraceStep {
    pub mover: Player,
    pub position: Position,
    pub action: Action,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameRecord {
    pub winner: Player,
    pub trace: Vec<TraceStep>,
}

fn run<C: CoinSource>(
    pair: &PolicyPair,
    coins: &mut C,
    mut record: impl FnMut(TraceStep),
) -> Player {
    let params = pair.params();
    let mut mover = Player::First;
    let mut pos = Position::turn_start(0, 0);
    loop {
        let action = if pos.a == 0 {
            Action::Continue
        } else {
            pair.policy(mover).action(pos)
        };
        let coin = match action {
            Action::Continue => Some(coins.toss()),
            Action::Stop => None,
        };
        let t = game::step(pos, action, coin, params).expect("policy moves are legal");
        record(TraceStep {
            mover,
            position: pos,
            action,
            outcome: t.outcome,
        });
        if t.terminal == Terminal::MoverWins {
            return mover;
        }
        if t.perspective_flipped {
            mover = mover.other();
        }
        pos = t.next;
    }
}

/// Play one game from `(0, 0, 0)` with the first player to move.
pub fn play_game<C: CoinSource>(pair: &PolicyPair, coins: &mut C) -> GameRecord {
    let mut trace = Vec::new();
    let winner = run(pair, coins, |s| trace.push(s));
    GameRecord { winner, trace }
}

/// Same as [`play_game`] without keeping the trace.
pub fn play_winner<C: CoinSource>(pair: &PolicyPair, coins: &mut C) -> Player {
    run(pair, coins, |_| {})
}

pub fn play_seeded(pair: &PolicyPair, seed: u64, game_index: u64) -> GameRecord {
    play_game(pair, &mut SeededCoins::new(seed, game_index))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use crate::game::Transition;
    use crate::interval::{solve_iterative, DEFAULT_EPSILON, DEFAULT_MAX_SWEEPS};

    fn params(n: u32) -> GameParams {
        GameParams::new(n).unwrap()
    }

    fn optimal(n: u32) -> Policy {
        solve_iterative(params(n), DEFAULT_EPSILON, DEFAULT_MAX_SWEEPS)
            .unwrap()
            .policy
    }

    #[test]
    fn two_point_pairs() {
        let cont = Policy::uniform(params(2), Action::Continue);
        assert_eq!(
            exact_pair_value(&PolicyPair::symmetric(cont.clone())).unwrap(),
            ratio(4, 7)
        );
        let mut bank_first = cont;
        bank_first.set(Position::new(1, 0, 0), Action::Stop);
        assert_eq!(
            exact_pair_value(&PolicyPair::symmetric(bank_first)).unwrap(),
            ratio(8, 15)
        );
    }

    #[test]
    fn optimal_beats_always_continue() {
        let best = optimal(3);
        let deviant = Policy::uniform(params(3), Action::Continue);
        let both = exact_pair_value(&PolicyPair::symmetric(best.clone())).unwrap();
        let dev = exact_pair_value(&PolicyPair::new(deviant, best).unwrap()).unwrap();
        assert_eq!(both, ratio(6, 11));
        assert!(dev <= both);
    }

    #[test]
    fn start_from_other_positions() {
        let pair = PolicyPair::symmetric(optimal(3));
        // mover with two banked against none: 8/9
        let v = exact_pair_value_from(&pair, Player::First, Position::turn_start(2, 0)).unwrap();
        assert_eq!(v, ratio(8, 9));
        // same position but the second player is the mover: first wins 1/9
        let v = exact_pair_value_from(&pair, Player::Second, Position::turn_start(2, 0)).unwrap();
        assert_eq!(v, ratio(1, 9));
        assert!(exact_pair_value_from(&pair, Player::First, Position::new(1, 2, 0)).is_err());
    }

    #[test]
    fn mismatched_targets_rejected() {
        assert!(PolicyPair::new(optimal(2), optimal(3)).is_err());
    }

    #[test]
    fn scripted_games() {
        let pair = PolicyPair::symmetric(optimal(2));
        let record = play_game(&pair, &mut ScriptedCoins::new([Coin::Heads, Coin::Heads]));
        assert_eq!(record.winner, Player::First);
        assert_eq!(record.trace.len(), 2);

        let record = play_game(
            &pair,
            &mut ScriptedCoins::new([Coin::Tails, Coin::Heads, Coin::Heads]),
        );
        assert_eq!(record.winner, Player::Second);
        assert_eq!(record.trace[1].mover, Player::Second);
    }

    #[test]
    fn traces_replay_through_step() {
        let pair = PolicyPair::symmetric(optimal(6));
        for index in 0..200 {
            let record = play_seeded(&pair, 7, index);
            assert_eq!(record, play_seeded(&pair, 7, index));
            let mut mover = Player::First;
            let mut pos = Position::turn_start(0, 0);
            for (k, s) in record.trace.iter().enumerate() {
                assert_eq!((s.mover, s.position), (mover, pos));
                let coin = match s.outcome {
                    Outcome::Toss(c) => Some(c),
                    Outcome::Banked => None,
                };
                let t: Transition = game::step(pos, s.action, coin, params(6)).unwrap();
                if t.terminal == Terminal::MoverWins {
                    assert_eq!(k + 1, record.trace.len());
                    assert_eq!(record.winner, mover);
                }
                if t.perspective_flipped {
                    mover = mover.other();
                }
                pos = t.next;
            }
        }
    }

    #[test]
    fn seeded_streams_are_distinct() {
        let mut a = SeededCoins::new(1, 0);
        let mut b = SeededCoins::new(1, 1);
        let xs: Vec<Coin> = (0..64).map(|_| a.toss()).collect();
        let ys: Vec<Coin> = (0..64).map(|_| b.toss()).collect();
        assert_ne!(xs, ys);
    }
}
