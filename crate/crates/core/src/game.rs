//! Rules of the game: positions, legal moves and the transition function.
//!
//! A position is always seen from the player about to act (the *mover*):
//! `a` open points in the current streak, `b` points the mover has banked and
//! `c` points the opponent has banked. Whenever the turn passes the triple is
//! rewritten from the other player's point of view, so a winning probability
//! `p` for one side becomes `1 - p` for the other.

use alloc::vec::Vec;
use core::fmt;

use crate::GameError;

/// Largest target accepted by [`GameParams::new`]. Keeps every index
/// computation comfortably inside `u32`/`usize`.
pub const MAX_TARGET: u32 = 1024;

/// `(a, b, c)`: mover's open points, mover's saved points, opponent's saved points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub a: u32,
    pub b: u32,
    pub c: u32,
}

impl Position {
    pub const fn new(a: u32, b: u32, c: u32) -> Self {
        Position { a, b, c }
    }

    /// The start of a turn for the player who has `b` banked against `c`.
    pub const fn turn_start(b: u32, c: u32) -> Self {
        Position { a: 0, b, c }
    }

    /// True while neither player has won: `a + b < n` and `c < n`.
    pub fn is_alive(&self, params: GameParams) -> bool {
        self.a + self.b < params.n && self.c < params.n
    }

    /// A position where the mover actually chooses between tossing on and banking.
    pub fn is_decision(&self, params: GameParams) -> bool {
        self.a >= 1 && self.is_alive(params)
    }

    /// A position not reducible to a smaller target: one of the players has
    /// nothing banked yet.
    pub fn is_new(&self, params: GameParams) -> bool {
        self.is_alive(params) && (self.b == 0 || self.c == 0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// The target score.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GameParams {
    n: u32,
}

impl GameParams {
    pub fn new(n: u32) -> Result<Self, GameError> {
        if n == 0 || n > MAX_TARGET {
            return Err(GameError::InvalidTarget(n));
        }
        Ok(GameParams { n })
    }

    pub const fn n(&self) -> u32 {
        self.n
    }

    /// Dense index over the `n³` cube of triples with every coordinate `< n`.
    /// Every alive position has a slot; dead slots are simply never used.
    pub fn index(&self, pos: Position) -> usize {
        let n = self.n as usize;
        (pos.b as usize * n + pos.c as usize) * n + pos.a as usize
    }

    pub fn cube_len(&self) -> usize {
        let n = self.n as usize;
        n * n * n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    /// Toss again, risking the open points.
    Continue,
    /// Bank the open points and hand over the coin.
    Stop,
}

impl Action {
    pub fn flipped(self) -> Action {
        match self {
            Action::Continue => Action::Stop,
            Action::Stop => Action::Continue,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Action::Continue => "continue",
            Action::Stop => "stop",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coin {
    Heads,
    Tails,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Toss(Coin),
    Banked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Terminal {
    None,
    MoverWins,
}

/// Result of applying one move.
///
/// `next` is written from the perspective of whoever acts next. When the
/// mover wins, `next` is the (dead) winning triple in the mover's own frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub outcome: Outcome,
    pub next: Position,
    pub perspective_flipped: bool,
    pub terminal: Terminal,
}

/// Apply `action` at `pos`. `coin` is the toss result for [`Action::Continue`]
/// and is ignored for [`Action::Stop`].
pub fn step(
    pos: Position,
    action: Action,
    coin: Option<Coin>,
    params: GameParams,
) -> Result<Transition, GameError> {
    if !pos.is_alive(params) {
        return Err(GameError::DeadPosition(pos));
    }
    let n = params.n;
    match action {
        Action::Continue => {
            let coin = coin.ok_or(GameError::MissingToss)?;
            Ok(match coin {
                Coin::Heads => {
                    let next = Position::new(pos.a + 1, pos.b, pos.c);
                    let terminal = if next.a + next.b == n {
                        Terminal::MoverWins
                    } else {
                        Terminal::None
                    };
                    Transition {
                        outcome: Outcome::Toss(Coin::Heads),
                        next,
                        perspective_flipped: false,
                        terminal,
                    }
                }
                Coin::Tails => Transition {
                    outcome: Outcome::Toss(Coin::Tails),
                    next: Position::turn_start(pos.c, pos.b),
                    perspective_flipped: true,
                    terminal: Terminal::None,
                },
            })
        }
        Action::Stop => {
            if pos.a == 0 {
                return Err(GameError::IllegalAction(pos));
            }
            let banked = pos.a + pos.b;
            // Unreachable from an alive position, kept so the rule is total.
            if banked >= n {
                return Ok(Transition {
                    outcome: Outcome::Banked,
                    next: Position::new(0, banked, pos.c),
                    perspective_flipped: false,
                    terminal: Terminal::MoverWins,
                });
            }
            Ok(Transition {
                outcome: Outcome::Banked,
                next: Position::turn_start(pos.c, banked),
                perspective_flipped: true,
                terminal: Terminal::None,
            })
        }
    }
}

/// All alive positions, ordered by `(b, c, a)`.
pub fn alive_positions(params: GameParams) -> Vec<Position> {
    let n = params.n;
    let mut out = Vec::with_capacity((n * n * (n + 1) / 2) as usize);
    for b in 0..n {
        for c in 0..n {
            for a in 0..n - b {
                out.push(Position::new(a, b, c));
            }
        }
    }
    out
}

/// Positions in which some player has banked nothing, ordered by `(b, c, a)`.
/// There are `n(3n - 1)/2` of them.
pub fn new_positions(params: GameParams) -> Vec<Position> {
    alive_positions(params)
        .into_iter()
        .filter(|p| p.b == 0 || p.c == 0)
        .collect()
}

/// Sort key shared by every sweep and export: descending `a + b`, then
/// descending `a`, then ascending `c`.
pub fn sweep_key(p: &Position) -> (core::cmp::Reverse<u32>, core::cmp::Reverse<u32>, u32) {
    (core::cmp::Reverse(p.a + p.b), core::cmp::Reverse(p.a), p.c)
}

/// Decision positions (`0 < a`, `a + b < n`, `c < n`) in sweep order.
/// There are `(n - 1) n² / 2` of them.
pub fn decision_positions(params: GameParams) -> Vec<Position> {
    let mut out: Vec<Position> = alive_positions(params)
        .into_iter()
        .filter(|p| p.a >= 1)
        .collect();
    out.sort_by_key(sweep_key);
    out
}

/// Every alive position in sweep order (turn starts included).
pub fn positions_in_sweep_order(params: GameParams) -> Vec<Position> {
    let mut out = alive_positions(params);
    out.sort_by_key(sweep_key);
    out
}

/// Target-independent description of a position: open points plus what each
/// player still needs to bank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NeedsView {
    pub a: u32,
    /// Points the mover still needs, counting saved points only.
    pub r: u32,
    /// Points the opponent still needs.
    pub s: u32,
}

impl NeedsView {
    /// The position this view corresponds to at target `params.n`, if any.
    pub fn to_position(&self, params: GameParams) -> Option<Position> {
        let n = params.n;
        if self.r == 0 || self.s == 0 || self.r > n || self.s > n || self.a >= self.r {
            return None;
        }
        Some(Position::new(self.a, n - self.r, n - self.s))
    }
}

pub fn needs_view(pos: Position, params: GameParams) -> Result<NeedsView, GameError> {
    if !pos.is_alive(params) {
        return Err(GameError::DeadPosition(pos));
    }
    Ok(NeedsView {
        a: pos.a,
        r: params.n - pos.b,
        s: params.n - pos.c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
    use alloc::vec;

    fn params(n: u32) -> GameParams {
        GameParams::new(n).unwrap()
    }

    #[test]
    fn heads_to_target_wins() {
        let t = step(
            Position::new(1, 0, 0),
            Action::Continue,
            Some(Coin::Heads),
            params(2),
        )
        .unwrap();
        assert_eq!(t.terminal, Terminal::MoverWins);
        assert!(!t.perspective_flipped);
    }

    #[test]
    fn stop_banks_and_flips() {
        let t = step(Position::new(1, 0, 1), Action::Stop, None, params(3)).unwrap();
        assert_eq!(t.next, Position::new(0, 1, 1));
        assert!(t.perspective_flipped);
        assert_eq!(t.outcome, Outcome::Banked);
        assert_eq!(t.terminal, Terminal::None);
    }

    #[test]
    fn tails_discards_open_points() {
        let t = step(
            Position::new(2, 0, 1),
            Action::Continue,
            Some(Coin::Tails),
            params(4),
        )
        .unwrap();
        assert_eq!(t.next, Position::new(0, 1, 0));
        assert!(t.perspective_flipped);
    }

    #[test]
    fn illegal_and_dead() {
        assert_eq!(
            step(Position::new(0, 0, 0), Action::Stop, None, params(3)),
            Err(GameError::IllegalAction(Position::new(0, 0, 0)))
        );
        assert_eq!(
            step(
                Position::new(2, 1, 0),
                Action::Continue,
                Some(Coin::Heads),
                params(3)
            ),
            Err(GameError::DeadPosition(Position::new(2, 1, 0)))
        );
        assert_eq!(
            step(
                Position::new(0, 0, 3),
                Action::Continue,
                Some(Coin::Heads),
                params(3)
            ),
            Err(GameError::DeadPosition(Position::new(0, 0, 3)))
        );
        assert!(GameParams::new(0).is_err());
    }

    #[test]
    fn new_positions_small_targets() {
        let two = new_positions(params(2));
        let expected: BTreeSet<_> = [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 0, 1)]
            .iter()
            .map(|&(a, b, c)| Position::new(a, b, c))
            .collect();
        assert_eq!(two.iter().copied().collect::<BTreeSet<_>>(), expected);
        // (b, c, a) ordering
        assert_eq!(
            two,
            vec![
                Position::new(0, 0, 0),
                Position::new(1, 0, 0),
                Position::new(0, 0, 1),
                Position::new(1, 0, 1),
                Position::new(0, 1, 0),
            ]
        );

        // the twelve equations written out for three points
        let three: BTreeSet<_> = new_positions(params(3)).into_iter().collect();
        let listed: BTreeSet<_> = [
            (0, 0, 0),
            (0, 0, 1),
            (0, 1, 0),
            (1, 0, 0),
            (0, 0, 2),
            (0, 2, 0),
            (1, 0, 1),
            (1, 1, 0),
            (2, 0, 0),
            (1, 0, 2),
            (2, 0, 1),
            (2, 0, 2),
        ]
        .iter()
        .map(|&(a, b, c)| Position::new(a, b, c))
        .collect();
        assert_eq!(three, listed);
        assert_eq!(new_positions(params(6)).len(), 51);
    }

    #[test]
    fn decision_positions_order() {
        assert_eq!(
            decision_positions(params(2)),
            vec![Position::new(1, 0, 0), Position::new(1, 0, 1)]
        );
        assert_eq!(decision_positions(params(3)).len(), 9);
        assert_eq!(decision_positions(params(20)).len(), 3800);
        let d = decision_positions(params(4));
        assert_eq!(d[0], Position::new(3, 0, 0));
        assert!(d.windows(2).all(|w| sweep_key(&w[0]) < sweep_key(&w[1])));
    }

    #[test]
    fn count_identities() {
        for n in 1..=50u32 {
            let p = params(n);
            assert_eq!(new_positions(p).len() as u32, (3 * n * n - n) / 2);
            if n >= 2 {
                assert_eq!(decision_positions(p).len() as u32, (n - 1) * n * n / 2);
            }
        }
    }

    #[test]
    fn needs_view_examples() {
        assert_eq!(
            needs_view(Position::new(1, 0, 0), params(3)).unwrap(),
            NeedsView { a: 1, r: 3, s: 3 }
        );
        assert_eq!(
            needs_view(Position::new(0, 2, 1), params(3)).unwrap(),
            NeedsView { a: 0, r: 1, s: 2 }
        );
        let v = needs_view(Position::new(2, 1, 3), params(5)).unwrap();
        assert_eq!(v, NeedsView { a: 2, r: 4, s: 2 });
        assert_eq!(v.to_position(params(5)), Some(Position::new(2, 1, 3)));
    }

    /// Canonical shape of the subgame reachable from a needs view: BFS with
    /// nodes renamed by discovery order, edges labelled by move.
    fn subgame_shape(start: Position, p: GameParams) -> Vec<Vec<(u8, Option<usize>, bool)>> {
        let mut ids = BTreeMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        ids.insert(start, 0usize);
        order.push(start);
        queue.push_back(start);
        let mut edges = Vec::new();
        while let Some(pos) = queue.pop_front() {
            let mut out = Vec::new();
            let moves: &[(u8, Action, Option<Coin>)] = &[
                (0, Action::Continue, Some(Coin::Heads)),
                (1, Action::Continue, Some(Coin::Tails)),
                (2, Action::Stop, None),
            ];
            for &(label, action, coin) in moves {
                let Ok(t) = step(pos, action, coin, p) else {
                    continue;
                };
                if t.terminal == Terminal::MoverWins {
                    out.push((label, None, t.perspective_flipped));
                    continue;
                }
                let id = *ids.entry(t.next).or_insert_with(|| {
                    order.push(t.next);
                    queue.push_back(t.next);
                    order.len() - 1
                });
                out.push((label, Some(id), t.perspective_flipped));
            }
            edges.push(out);
        }
        edges
    }

    #[test]
    fn needs_equivalence_isomorphic_subgames() {
        for n1 in 1..=6u32 {
            for n2 in n1..=6u32 {
                let (p1, p2) = (params(n1), params(n2));
                for pos in alive_positions(p1) {
                    let view = needs_view(pos, p1).unwrap();
                    let Some(other) = view.to_position(p2) else {
                        continue;
                    };
                    assert_eq!(
                        subgame_shape(pos, p1),
                        subgame_shape(other, p2),
                        "{pos} at {n1} vs {other} at {n2}"
                    );
                }
            }
        }
    }

    #[test]
    fn transitions_stay_legal() {
        for n in 1..=8u32 {
            let p = params(n);
            for pos in alive_positions(p) {
                let mut moves = vec![
                    (Action::Continue, Some(Coin::Heads)),
                    (Action::Continue, Some(Coin::Tails)),
                ];
                if pos.a >= 1 {
                    moves.push((Action::Stop, None));
                }
                for (action, coin) in moves {
                    let t = step(pos, action, coin, p).unwrap();
                    match t.terminal {
                        Terminal::MoverWins => assert_eq!(t.next.a + t.next.b, n),
                        Terminal::None => assert!(t.next.is_alive(p)),
                    }
                    if t.perspective_flipped {
                        // the mover's new bank is the opponent's `c` after the flip
                        assert!(t.next.c <= pos.b + pos.a);
                        assert_eq!(t.next.b, pos.c);
                    } else {
                        assert_eq!(t.next.b, pos.b);
                    }
                }
            }
        }
    }
}
