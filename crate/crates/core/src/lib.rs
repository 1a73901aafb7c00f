//! Exact solving, refereeing and verification for the concurrent graph
//! sharing game.
//!
//! Two players share the vertices of a connected vertex-weighted graph. First
//! opens with any vertex; afterwards the player with the smaller collected
//! weight takes a non-taken vertex adjacent to the taken set.

pub mod adversary;
pub mod cli;
pub mod game;
pub mod generators;
pub mod io;
pub mod oracle;
pub mod solver;
pub mod verify;

pub use game::{Fraction, GameError, GameState, Instance, Player, TiePolicy, VertexSet};
pub use solver::{solve, SolveError, SolveReport};
