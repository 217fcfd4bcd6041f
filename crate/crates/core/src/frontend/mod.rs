//! Theory files: tokenizer, parser, elaboration into a typed environment,
//! and the tactic syntax.

mod candidate;
mod env;
pub mod syntax;

use std::sync::OnceLock;

use thiserror::Error;

pub use candidate::{parse_candidate, Candidate};
pub use env::{Clause, Constructor, Datatype, Function, Goal, TheoryEnv};
pub use syntax::Pos;

use env::{elaborate, Sources};
use syntax::{Item, Parser};

/// Source of the prelude loaded in front of every theory by default.
pub const PRELUDE: &str = include_str!("../../data/prelude.thy");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{pos}: parse error: expected {}, found {found}", .expected.join(" or "))]
    Parse {
        pos: Pos,
        expected: Vec<String>,
        found: String,
    },
    #[error("scope error: {0}")]
    Scope(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("invalid tactic: {0}")]
    InvalidCandidate(String),
}

impl FrontendError {
    /// Prefixes the message of non-positional errors with `ctx`.
    pub(crate) fn context(self, ctx: &str) -> FrontendError {
        match self {
            FrontendError::Scope(m) => FrontendError::Scope(format!("{ctx}: {m}")),
            FrontendError::Type(m) => FrontendError::Type(format!("{ctx}: {m}")),
            FrontendError::InvalidCandidate(m) => FrontendError::InvalidCandidate(format!("{ctx}: {m}")),
            e @ FrontendError::Parse { .. } => e,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    /// Load the prelude datatypes, functions and handcrafted rules.
    pub prelude: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { prelude: true }
    }
}

fn prelude_items() -> &'static [Item] {
    static ITEMS: OnceLock<Vec<Item>> = OnceLock::new();
    ITEMS.get_or_init(|| Parser::new(PRELUDE).and_then(|mut p| p.items()).expect("prelude parses"))
}

/// Parses and elaborates a theory file.
pub fn parse_theory(src: &str, opts: &ParseOptions) -> Result<TheoryEnv, FrontendError> {
    let user = Parser::new(src)?.items()?;
    elaborate(Sources {
        prelude: opts.prelude.then(prelude_items),
        user: &user,
    })
}
