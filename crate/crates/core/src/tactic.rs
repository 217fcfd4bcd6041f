//! Symbolic application of an induction candidate to a goal, and pruning of
//! candidates that fail or reproduce the goal.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::frontend::{Candidate, TheoryEnv};
use crate::kernel::{alpha_equal, substitute, Prop, Substitution, Term, Type, Typing};
use crate::rules::{structural_rule_name, InductionRule, RuleKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Failure {
    /// The first induction term has no datatype (type variable or arrow).
    NoDatatype,
    /// Rule arity differs from the number of induction terms.
    ArityMismatch,
    /// A rule position type does not unify with its induction term's type.
    IllTyped,
    /// The named rule is not registered.
    UnknownRule,
}

impl Failure {
    pub fn as_str(self) -> &'static str {
        match self {
            Failure::NoDatatype => "no-datatype",
            Failure::ArityMismatch => "arity-mismatch",
            Failure::IllTyped => "ill-typed",
            Failure::UnknownRule => "unknown-rule",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ApplyResult {
    Failure(Failure),
    /// One subgoal per rule case, never empty.
    Success(Vec<Prop>),
}

/// Why a candidate did not survive pruning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PruneReason {
    Failed(Failure),
    /// Some subgoal is alpha-equal to the original goal.
    NoProgress,
}

impl fmt::Display for PruneReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PruneReason::Failed(r) => r.fmt(f),
            PruneReason::NoProgress => f.write_str("no-progress"),
        }
    }
}

/// Replaces the `k`-th (0-based, pre-order) occurrence of variable `v`.
fn replace_nth_var(p: &Prop, v: &str, k: usize, with: &Term) -> Prop {
    fn term(t: &Term, v: &str, k: usize, seen: &mut usize, with: &Term) -> Term {
        match t {
            Term::Var(x) if x == v => {
                *seen += 1;
                if *seen - 1 == k {
                    with.clone()
                } else {
                    t.clone()
                }
            }
            Term::App(h, args) => {
                let h = term(h, v, k, seen, with);
                let args = args.iter().map(|a| term(a, v, k, seen, with)).collect();
                Term::app(h, args)
            }
            _ => t.clone(),
        }
    }
    fn prop(p: &Prop, v: &str, k: usize, seen: &mut usize, with: &Term) -> Prop {
        match p {
            Prop::Eq(l, r) => {
                let l = term(l, v, k, seen, with);
                Prop::Eq(l, term(r, v, k, seen, with))
            }
            Prop::Imp(a, c) => {
                let a = prop(a, v, k, seen, with);
                Prop::imp(a, prop(c, v, k, seen, with))
            }
            // occurrences under a binder of the same name belong to the binder
            Prop::Forall(x, _) if x == v => p.clone(),
            Prop::Forall(x, b) => Prop::forall(x.clone(), prop(b, v, k, seen, with)),
        }
    }
    prop(p, v, k, &mut 0, with)
}

/// Picks a name based on `base` that avoids `avoid` and every declared
/// constant.
fn fresh_var(base: &str, avoid: &BTreeSet<String>, env: &TheoryEnv) -> String {
    let taken = |n: &str| avoid.contains(n) || env.is_constant(n);
    if !taken(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !taken(n))
        .expect("unbounded suffix search")
}

/// Applies `c` to `goal`, producing one subgoal per case of the selected rule.
pub fn apply_induct(env: &TheoryEnv, goal: &Prop, c: &Candidate) -> ApplyResult {
    match apply(env, goal, c) {
        Ok(subgoals) => ApplyResult::Success(subgoals),
        Err(f) => ApplyResult::Failure(f),
    }
}

fn apply(env: &TheoryEnv, goal: &Prop, c: &Candidate) -> Result<Vec<Prop>, Failure> {
    let mut avoid: BTreeSet<String> = goal.all_names();
    avoid.extend(c.arbitrary.iter().cloned());

    // Generalisation: compound terms become fresh variables everywhere they
    // occur, and repeated listings of a variable bind its later occurrences.
    let mut g = goal.clone();
    let mut generalised: HashMap<Term, String> = HashMap::new();
    let mut vars: Vec<String> = Vec::new();
    for t in &c.induction_terms {
        let v = match t {
            Term::Var(v) => v.clone(),
            _ => {
                if let Some(v) = generalised.get(t) {
                    v.clone()
                } else {
                    let v = fresh_var("x", &avoid, env);
                    avoid.insert(v.clone());
                    let m: Substitution = [(t.clone(), Term::var(v.clone()))].into_iter().collect();
                    g = substitute(&g, &m);
                    generalised.insert(t.clone(), v.clone());
                    v
                }
            }
        };
        let listed_before = vars.iter().filter(|u| **u == v).count();
        if listed_before == 0 {
            vars.push(v);
        } else {
            let fresh = fresh_var(&v, &avoid, env);
            avoid.insert(fresh.clone());
            g = replace_nth_var(&g, &v, listed_before, &Term::var(fresh.clone()));
            vars.push(fresh);
        }
    }

    let mut arbitrary = c.arbitrary.clone();
    let rule: &InductionRule = match &c.rule {
        Some(name) => {
            let rule = env.rule(name).ok_or(Failure::UnknownRule)?;
            if rule.arity != vars.len() {
                return Err(Failure::ArityMismatch);
            }
            let mut typing = Typing::new(env);
            typing.check_prop(&g).map_err(|_| Failure::IllTyped)?;
            let joint = typing.unifier.instantiate(&Type::con("", rule.position_types.clone()));
            let Type::Con(_, positions) = joint else { unreachable!() };
            for (v, pt) in vars.iter().zip(&positions) {
                let vt = typing.var_type(v);
                typing.unifier.unify(&vt, pt).map_err(|_| Failure::IllTyped)?;
            }
            rule
        }
        None => {
            let mut typing = Typing::new(env);
            typing.check_prop(&g).map_err(|_| Failure::IllTyped)?;
            let vt = typing.var_type(&vars[0]);
            let datatype = match typing.resolve(&vt) {
                Type::Con(d, _) if env.datatype(&d).is_some() => d,
                _ => return Err(Failure::NoDatatype),
            };
            arbitrary.extend(vars.drain(1..));
            env.rule(&structural_rule_name(&datatype)).ok_or(Failure::UnknownRule)?
        }
    };

    // Names the case variables may not take: everything in the generalised
    // goal except the induction variables, which the cases replace.
    let mut case_avoid: BTreeSet<String> = g.all_names();
    case_avoid.extend(arbitrary.iter().cloned());
    for v in &vars {
        case_avoid.remove(v);
    }
    let structural = matches!(rule.kind, RuleKind::Structural { .. });

    let mut subgoals = Vec::with_capacity(rule.cases.len());
    for case in &rule.cases {
        let recursive: BTreeSet<&String> =
            case.hyps.iter().flat_map(|h| h.iter().filter_map(|t| t.as_var().and_then(|v| case.bindings.iter().find(|b| *b == v)))).collect();
        let rec_count = recursive.len();
        let mut used = case_avoid.clone();
        let mut rename = Substitution::new();
        let mut rec_seen = 0;
        for b in &case.bindings {
            let preferred = if structural && recursive.contains(b) {
                rec_seen += 1;
                if rec_count == 1 {
                    vars[0].clone()
                } else {
                    format!("{}{rec_seen}", vars[0])
                }
            } else {
                b.clone()
            };
            let name = fresh_var(&preferred, &used, env);
            used.insert(name.clone());
            if name != *b {
                rename.insert(Term::var(b.clone()), Term::var(name));
            }
        }
        let instantiate = |tuple: &[Term]| -> Prop {
            let m: Substitution = vars
                .iter()
                .zip(tuple)
                .map(|(v, t)| (Term::var(v.clone()), crate::kernel::substitute_term(t, &rename)))
                .collect();
            substitute(&g, &m)
        };
        let mut subgoal = instantiate(&case.conclusion);
        for hyp in case.hyps.iter().rev() {
            let ih = arbitrary
                .iter()
                .rev()
                .fold(instantiate(hyp), |body, x| Prop::forall(x.clone(), body));
            subgoal = Prop::imp(ih, subgoal);
        }
        subgoals.push(subgoal);
    }
    Ok(subgoals)
}

/// Applies `c` and checks that it makes progress on `goal`.
pub fn check(env: &TheoryEnv, goal: &Prop, c: &Candidate) -> Result<Vec<Prop>, PruneReason> {
    let subgoals = apply(env, goal, c).map_err(PruneReason::Failed)?;
    if subgoals.iter().any(|s| alpha_equal(s, goal)) {
        return Err(PruneReason::NoProgress);
    }
    Ok(subgoals)
}

/// Candidates that apply successfully and make progress, with their subgoals,
/// in input order.
pub fn prune(env: &TheoryEnv, goal: &Prop, cs: &[Candidate]) -> Vec<(Candidate, Vec<Prop>)> {
    cs.iter()
        .filter_map(|c| check(env, goal, c).ok().map(|s| (c.clone(), s)))
        .collect()
}
