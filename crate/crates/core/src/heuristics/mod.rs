//! A small assertion language over goals, candidates and definitions, and
//! weighted heuristic sets written in it.

pub mod ast;
pub mod eval;
mod parse;
mod sexp;

use serde::Serialize;
use thiserror::Error;

pub use ast::{Arg, Assertion, Domain, Expr, Heuristic, HeuristicSet, Kind, Param, Phase, Predicate, QuantKind};
pub use eval::{EvalContext, Evaluator, TreeIndex, Value};
pub use parse::{load_heuristics, BUILTINS};
pub use sexp::{read_all, Sexp};

use crate::frontend::{Candidate, Pos};

/// Source of the shipped heuristic set.
pub const DEFAULT_HEURISTICS: &str = include_str!("../../data/default.heur");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeuristicError {
    #[error("{pos}: parse error: {message}")]
    Parse { pos: Pos, message: String },
    #[error("{pos}: scope error: {message}")]
    Scope { pos: Pos, message: String },
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unknown assertion `{0}`")]
    UnknownAssertion(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("context error: {0}")]
    Context(String),
    #[error("in heuristic `{name}`: {source}")]
    InHeuristic {
        name: String,
        #[source]
        source: Box<HeuristicError>,
    },
}

/// The shipped heuristic set.
pub fn default_heuristics() -> HeuristicSet {
    load_heuristics(DEFAULT_HEURISTICS).expect("shipped heuristics load")
}

/// One heuristic's verdict on one candidate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeuristicOutcome {
    pub name: String,
    pub phase: Phase,
    pub holds: bool,
    pub weight: i64,
    pub contribution: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scored {
    pub candidate: Candidate,
    pub points: i64,
    pub breakdown: Vec<HeuristicOutcome>,
}

/// Evaluates every heuristic of `phase` on one candidate.
pub fn score_one(ev: &Evaluator<'_>, phase: Phase, ctx: &EvalContext<'_>) -> Result<Scored, HeuristicError> {
    let mut breakdown = Vec::new();
    let mut points = 0;
    for h in ev.set.phase(phase) {
        let holds = ev.eval(&h.expr, ctx).map_err(|e| HeuristicError::InHeuristic {
            name: h.name.clone(),
            source: Box::new(e),
        })?;
        let contribution = if holds { h.weight } else { 0 };
        points += contribution;
        breakdown.push(HeuristicOutcome {
            name: h.name.clone(),
            phase,
            holds,
            weight: h.weight,
            contribution,
        });
    }
    Ok(Scored {
        candidate: ctx.candidate.clone(),
        points,
        breakdown,
    })
}

/// Scores each context's candidate: the sum of the weights of the
/// heuristics of `phase` that hold. Output order follows input order.
pub fn score(ev: &Evaluator<'_>, phase: Phase, items: &[EvalContext<'_>]) -> Result<Vec<Scored>, HeuristicError> {
    items.iter().map(|ctx| score_one(ev, phase, ctx)).collect()
}
