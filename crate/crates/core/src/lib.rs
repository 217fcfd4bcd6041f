//! Recommending induction tactics for equational goals over recursive
//! functions.

pub mod frontend;
pub mod kernel;
pub mod rules;
pub mod candidates;
pub mod tactic;
pub mod heuristics;
pub mod pipeline;
pub mod harness;
