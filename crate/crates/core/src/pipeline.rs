//! From a goal to a ranked list of induction tactics: generate candidates,
//! prune those that fail, score induction arguments, expand generalisations
//! of the best few and score those.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::candidates::{generate_capped, DEFAULT_CANDIDATE_CAP};
use crate::frontend::{Candidate, TheoryEnv};
use crate::heuristics::{score_one, EvalContext, Evaluator, HeuristicError, HeuristicSet, Phase, TreeIndex};
use crate::kernel::Prop;
use crate::rules::RuleKind;
use crate::tactic;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Config {
    /// Candidates kept after induction scoring.
    pub keep_k: usize,
    /// Recommendations returned.
    pub top_n: usize,
    pub timeout_ms: Option<u64>,
    /// Most free variables whose full powerset is expanded.
    pub powerset_cap: usize,
    pub candidate_cap: usize,
    /// Treat a datatype's structural rule on a single term as no rule when
    /// comparing candidates.
    pub normalize_default_rule: bool,
}

impl Default for Config {
    fn default() -> Config {
        Config {
            keep_k: 5,
            top_n: 10,
            timeout_ms: None,
            powerset_cap: 10,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
            normalize_default_rule: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Recommendation {
    pub rank: usize,
    #[serde(skip)]
    pub candidate: Candidate,
    pub total: i64,
    pub induction_points: i64,
    pub generalisation_points: i64,
    pub tactic: String,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("unknown goal `{0}`")]
    UnknownGoal(String),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
}

/// Result of a budgeted run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Advice {
    pub recommendations: Vec<Recommendation>,
    /// The deadline passed before every stage finished; the list ranks
    /// whatever had been scored by then.
    pub truncated: bool,
    pub elapsed: Duration,
}

/// Ranks tactics for the named goal without a deadline, unless the config
/// sets one.
pub fn advise(env: &TheoryEnv, hs: &HeuristicSet, goal: &str, config: &Config) -> Result<Vec<Recommendation>, PipelineError> {
    let budget = config.timeout_ms.map(Duration::from_millis);
    Ok(run(env, hs, goal, config, budget)?.recommendations)
}

/// Ranks tactics for the named goal, stopping at `budget`.
pub fn advise_with_budget(
    env: &TheoryEnv,
    hs: &HeuristicSet,
    goal: &str,
    config: &Config,
    budget: Duration,
) -> Result<Advice, PipelineError> {
    run(env, hs, goal, config, Some(budget))
}

fn run(env: &TheoryEnv, hs: &HeuristicSet, goal: &str, config: &Config, budget: Option<Duration>) -> Result<Advice, PipelineError> {
    let prop = &env.goal(goal).ok_or_else(|| PipelineError::UnknownGoal(goal.to_string()))?.prop;
    advise_prop(env, hs, prop, config, budget)
}

struct Deadline(Option<Instant>);

impl Deadline {
    fn passed(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

struct Scored {
    candidate: Candidate,
    induction: i64,
    generalisation: i64,
}

impl Scored {
    fn total(&self) -> i64 {
        self.induction + self.generalisation
    }
}

/// Highest total first, ties by rendered tactic.
fn rank(items: &mut [Scored]) {
    items.sort_by_cached_key(|s| (Reverse(s.total()), s.candidate.to_string()));
}

fn finish(mut items: Vec<Scored>, config: &Config, truncated: bool, start: Instant) -> Advice {
    rank(&mut items);
    items.truncate(config.top_n);
    let recommendations = items
        .into_iter()
        .enumerate()
        .map(|(i, s)| Recommendation {
            rank: i + 1,
            tactic: s.candidate.to_string(),
            total: s.total(),
            induction_points: s.induction,
            generalisation_points: s.generalisation,
            candidate: s.candidate,
        })
        .collect();
    Advice {
        recommendations,
        truncated,
        elapsed: start.elapsed(),
    }
}

/// The whole pipeline on a proposition.
pub fn advise_prop(
    env: &TheoryEnv,
    hs: &HeuristicSet,
    goal: &Prop,
    config: &Config,
    budget: Option<Duration>,
) -> Result<Advice, PipelineError> {
    let start = Instant::now();
    let deadline = Deadline(budget.map(|b| start + b));
    let ev = Evaluator::new(env, hs);
    let tree = TreeIndex::goal(goal);

    let candidates = generate_capped(env, goal, config.candidate_cap);
    let mut survivors = Vec::new();
    for c in candidates {
        if deadline.passed() {
            return Ok(finish(Vec::new(), config, true, start));
        }
        if tactic::check(env, goal, &c).is_ok() {
            survivors.push(c);
        }
    }

    let mut scored = Vec::with_capacity(survivors.len());
    for c in survivors {
        if deadline.passed() {
            return Ok(finish(scored, config, true, start));
        }
        let s = score_one(&ev, Phase::Induction, &EvalContext { tree: &tree, candidate: &c })?;
        scored.push(Scored {
            candidate: c,
            induction: s.points,
            generalisation: 0,
        });
    }
    rank(&mut scored);
    scored.truncate(config.keep_k);

    let mut out = Vec::new();
    for (i, s) in scored.iter().enumerate() {
        for c in expand_arbitrary(goal, &s.candidate, config.powerset_cap) {
            if deadline.passed() {
                // Unexpanded survivors still count with their induction score.
                out.extend(scored[i..].iter().map(|s| Scored {
                    candidate: s.candidate.clone(),
                    induction: s.induction,
                    generalisation: 0,
                }));
                dedup(&mut out);
                return Ok(finish(out, config, true, start));
            }
            if tactic::check(env, goal, &c).is_err() {
                continue;
            }
            let g = score_one(&ev, Phase::Generalisation, &EvalContext { tree: &tree, candidate: &c })?;
            out.push(Scored {
                candidate: c,
                induction: s.induction,
                generalisation: g.points,
            });
        }
    }
    Ok(finish(out, config, false, start))
}

fn dedup(items: &mut Vec<Scored>) {
    let mut seen = BTreeSet::new();
    items.retain(|s| seen.insert(s.candidate.clone()));
}

/// Free variables of `goal` not occurring in `c`'s induction terms, in
/// order of first occurrence.
pub fn eligible_arbitrary(goal: &Prop, c: &Candidate) -> Vec<String> {
    let used: BTreeSet<String> = c.induction_terms.iter().flat_map(|t| t.vars()).collect();
    goal.free_vars_ordered().into_iter().filter(|v| !used.contains(v)).collect()
}

/// `c` with every subset of its eligible variables as arbitrary set, smaller
/// sets first. Beyond `cap` eligible variables only the empty set and
/// singletons are produced.
pub fn expand_arbitrary(goal: &Prop, c: &Candidate, cap: usize) -> Vec<Candidate> {
    let vars = eligible_arbitrary(goal, c);
    let mut sets: Vec<BTreeSet<String>> = if vars.len() > cap {
        log::warn!("{} generalisable variables exceed the cap of {cap}; expanding singletons only", vars.len());
        std::iter::once(BTreeSet::new())
            .chain(vars.iter().map(|v| BTreeSet::from([v.clone()])))
            .collect()
    } else {
        (0u64..1 << vars.len())
            .map(|mask| vars.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| v.clone()).collect())
            .collect()
    };
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.into_iter()
        .map(|arbitrary| Candidate {
            arbitrary,
            ..c.clone()
        })
        .collect()
}

/// Exact agreement: same induction terms in order, same arbitrary set, same
/// rule.
pub fn coincides(a: &Candidate, b: &Candidate) -> bool {
    a == b
}

/// Like [`coincides`], but a datatype's structural rule on a single term
/// matches the absence of a rule.
pub fn coincides_normalized(env: &TheoryEnv, a: &Candidate, b: &Candidate) -> bool {
    normalize(env, a) == normalize(env, b)
}

fn normalize(env: &TheoryEnv, c: &Candidate) -> Candidate {
    let structural = c
        .rule
        .as_deref()
        .and_then(|r| env.rule(r))
        .is_some_and(|r| matches!(r.kind, RuleKind::Structural { .. }));
    if structural && c.induction_terms.len() == 1 {
        c.with_rule(None)
    } else {
        c.clone()
    }
}

/// Whether `expected` coincides with the candidate under `config`'s matching
/// mode.
pub fn coincides_under(env: &TheoryEnv, config: &Config, expected: &Candidate, got: &Candidate) -> bool {
    if config.normalize_default_rule {
        coincides_normalized(env, expected, got)
    } else {
        coincides(expected, got)
    }
}
