//! Command line, JSON documents, Monte-Carlo driver and HTTP service around
//! [`riskgame_core`].

pub mod cli;
pub mod document;
pub mod server;
pub mod simulate;
pub mod solver;
pub mod table;
pub mod verify;
