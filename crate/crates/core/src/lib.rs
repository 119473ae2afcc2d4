//! Exact solver for a two-player coin-tossing race.
//!
//! The player to move tosses a coin. Heads adds an open point, after which
//! the player may toss again or bank everything that is open. Tails throws
//! the open points away. Banking and tails both end the turn. The first player
//! whose banked and open points together reach `n` wins.
//!
//! The crate computes the unique optimal (stationary, pure) strategy and its
//! exact rational winning probabilities in two independent ways:
//!
//! * [`analytic`] enumerates strategies component by component and solves
//!   each induced linear system exactly;
//! * [`interval`] brackets every decision between lower and upper bounds
//!   until the better action is certain, then solves the resulting policy
//!   exactly and double-checks every decision in rational arithmetic.
//!
//! [`analysis`] turns a solved policy into the "how many coins to toss" table
//! and carries the closed-form all-in results. [`simulation`] evaluates
//! arbitrary strategy pairs exactly and plays seeded games for Monte-Carlo
//! cross-checks.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod analytic;
mod error;
pub mod exact;
pub mod game;
pub mod interval;
pub mod policy;
pub mod simulation;

pub use error::{AnalysisError, AnalyticError, GameError, IntervalError, SolveError};
pub use exact::BigRational;
pub use game::{Action, Coin, GameParams, NeedsView, Position};
pub use policy::{Policy, ValueMap};
