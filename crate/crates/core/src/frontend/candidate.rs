use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use super::syntax::{Parser, Tok};
use super::{FrontendError, TheoryEnv};
use crate::kernel::{Prop, Term};

/// An induction tactic: the terms to induct on, the variables to generalise
/// in the induction hypotheses, and an optional rule name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Candidate {
    pub induction_terms: Vec<Term>,
    pub arbitrary: BTreeSet<String>,
    pub rule: Option<String>,
}

impl Candidate {
    /// Fails if there are no induction terms or an arbitrary variable occurs
    /// in an induction term.
    pub fn new(
        induction_terms: Vec<Term>,
        arbitrary: BTreeSet<String>,
        rule: Option<String>,
    ) -> Result<Candidate, FrontendError> {
        if induction_terms.is_empty() {
            return Err(FrontendError::InvalidCandidate("at least one induction term is required".into()));
        }
        let term_vars: BTreeSet<String> = induction_terms.iter().flat_map(Term::vars).collect();
        if let Some(v) = term_vars.iter().find(|v| arbitrary.contains(*v)) {
            return Err(FrontendError::InvalidCandidate(format!(
                "`{v}` occurs in an induction term and cannot be arbitrary"
            )));
        }
        Ok(Candidate {
            induction_terms,
            arbitrary,
            rule,
        })
    }

    /// Same tactic with the rule replaced.
    pub fn with_rule(&self, rule: Option<String>) -> Candidate {
        Candidate {
            rule,
            ..self.clone()
        }
    }
}

fn fmt_arg(t: &Term) -> String {
    match t {
        Term::App(..) => format!("({t})"),
        _ => t.to_string(),
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("induct")?;
        for t in &self.induction_terms {
            write!(f, " {}", fmt_arg(t))?;
        }
        if !self.arbitrary.is_empty() {
            f.write_str(" arbitrary:")?;
            for v in &self.arbitrary {
                write!(f, " {v}")?;
            }
        }
        if let Some(r) = &self.rule {
            write!(f, " rule: {r}")?;
        }
        Ok(())
    }
}

impl Serialize for Candidate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `induct t1 .. tn [arbitrary: v1 .. vm] [rule: name]` for `goal`.
/// The two optional clauses may appear in either order.
pub fn parse_candidate(text: &str, env: &TheoryEnv, goal: &Prop) -> Result<Candidate, FrontendError> {
    let mut p = Parser::new(text)?;
    if !p.is_keyword("induct") {
        return p.error(&["`induct`"]);
    }
    p.name()?;
    let is_clause = |p: &Parser| p.is_keyword("arbitrary") || p.is_keyword("rule");
    let mut raw_terms = Vec::new();
    while !p.at_eof() && !is_clause(&p) {
        raw_terms.push(p.atom()?);
    }
    let mut arbitrary = BTreeSet::new();
    let mut rule = None;
    let mut seen_arbitrary = false;
    while !p.at_eof() {
        if p.is_keyword("arbitrary") && !seen_arbitrary {
            seen_arbitrary = true;
            p.name()?;
            p.expect_sym(":")?;
            while matches!(p.peek(), Tok::Ident(_)) && !is_clause(&p) {
                let (v, _) = p.name()?;
                if !arbitrary.insert(v.clone()) {
                    return Err(FrontendError::InvalidCandidate(format!("`{v}` is listed twice as arbitrary")));
                }
            }
            if arbitrary.is_empty() {
                return p.error(&["variable"]);
            }
        } else if p.is_keyword("rule") && rule.is_none() {
            p.expect_keyword("rule")?;
            p.expect_sym(":")?;
            match p.peek().clone() {
                Tok::Ident(r) => {
                    p.expect_keyword(&r)?;
                    rule = Some(r);
                }
                _ => return p.error(&["rule name"]),
            }
        } else {
            return p.error(&["`arbitrary:`", "`rule:`", "end of tactic"]);
        }
    }
    let free = goal.free_vars();
    let mut terms = Vec::new();
    for raw in &raw_terms {
        let t = env.resolve_term(raw)?;
        if let Some(v) = t.vars().into_iter().find(|v| !free.contains(v)) {
            return Err(FrontendError::Scope(format!("`{v}` is not a variable of the goal")));
        }
        terms.push(t);
    }
    if let Some(v) = arbitrary.iter().find(|v| !free.contains(*v)) {
        return Err(FrontendError::Scope(format!("`{v}` is not a variable of the goal")));
    }
    if let Some(r) = &rule {
        if !env.rules.contains(r) {
            return Err(FrontendError::Scope(format!("unknown rule `{r}`")));
        }
    }
    Candidate::new(terms, arbitrary, rule)
}
