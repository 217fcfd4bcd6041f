//! Induction rules: structural rules derived from datatypes, computation
//! rules derived from function definitions, and the handcrafted prelude
//! registry.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::frontend::TheoryEnv;
use crate::kernel::{fresh_name, Term, Type};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("unknown datatype `{0}`")]
    UnknownDatatype(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RuleTarget {
    Datatype(String),
    Function(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum RuleKind {
    Structural { datatype: String },
    Computation { function: String },
    Handcrafted { target: RuleTarget },
}

/// One case of an induction rule. Every tuple has exactly `arity` entries and
/// only mentions `bindings` and declared constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RuleCase {
    pub bindings: Vec<String>,
    pub hyps: Vec<Vec<Term>>,
    pub conclusion: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InductionRule {
    pub name: String,
    pub arity: usize,
    pub position_types: Vec<Type>,
    pub cases: Vec<RuleCase>,
    pub kind: RuleKind,
}

impl fmt::Display for InductionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tuple = |ts: &[Term]| ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ");
        writeln!(f, "{} ({} position{})", self.name, self.arity, if self.arity == 1 { "" } else { "s" })?;
        for case in &self.cases {
            write!(f, "  case [{}]", tuple(&case.conclusion))?;
            if !case.hyps.is_empty() {
                f.write_str(" from")?;
                for h in &case.hyps {
                    write!(f, " [{}]", tuple(h))?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Named rules of an environment plus the handcrafted registrations, in
/// declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleRegistry {
    rules: BTreeMap<String, InductionRule>,
    handcrafted: Vec<String>,
}

impl RuleRegistry {
    pub fn get(&self, name: &str) -> Option<&InductionRule> {
        self.rules.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.rules.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.rules.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub(crate) fn insert(&mut self, rule: InductionRule) -> Result<(), InductionRule> {
        if self.rules.contains_key(&rule.name) {
            return Err(rule);
        }
        if matches!(rule.kind, RuleKind::Handcrafted { .. }) {
            self.handcrafted.push(rule.name.clone());
        }
        self.rules.insert(rule.name.clone(), rule);
        Ok(())
    }

    fn handcrafted(&self) -> impl Iterator<Item = &InductionRule> {
        self.handcrafted.iter().filter_map(|n| self.rules.get(n))
    }
}

pub fn structural_rule_name(datatype: &str) -> String {
    format!("{datatype}.induct")
}

pub fn computation_rule_name(function: &str) -> String {
    format!("{function}.induct")
}

/// Structural induction over a datatype: one case per constructor and one
/// hypothesis per argument whose type is the datatype itself.
pub fn structural_rule(env: &TheoryEnv, datatype: &str) -> Result<InductionRule, RuleError> {
    let dt = env
        .datatype(datatype)
        .ok_or_else(|| RuleError::UnknownDatatype(datatype.to_string()))?;
    let self_ty = dt.self_type();
    let rec_base: String = dt.name.chars().next().filter(|c| c.is_alphabetic()).unwrap_or('t').to_string();
    let mut cases = Vec::new();
    for ctor in &dt.ctors {
        let rec_count = ctor.args.iter().filter(|a| **a == self_ty).count();
        let mut used = BTreeSet::new();
        let mut bindings = Vec::new();
        let mut hyps = Vec::new();
        let mut next_plain = 0u8;
        let mut next_rec = 0usize;
        for arg in &ctor.args {
            let name = if *arg == self_ty {
                next_rec += 1;
                let base = if rec_count == 1 { rec_base.clone() } else { format!("{rec_base}{next_rec}") };
                fresh_name(&base, &used)
            } else {
                let base = ((b'a' + next_plain % 26) as char).to_string();
                next_plain += 1;
                fresh_name(&base, &used)
            };
            used.insert(name.clone());
            if *arg == self_ty {
                hyps.push(vec![Term::var(name.clone())]);
            }
            bindings.push(name);
        }
        let conclusion = Term::app(Term::constant(ctor.name.clone()), bindings.iter().map(Term::var).collect());
        cases.push(RuleCase {
            bindings,
            hyps,
            conclusion: vec![conclusion],
        });
    }
    Ok(InductionRule {
        name: structural_rule_name(&dt.name),
        arity: 1,
        position_types: vec![self_ty],
        cases,
        kind: RuleKind::Structural {
            datatype: dt.name.clone(),
        },
    })
}

/// Computation induction following a function's clauses: one case per
/// clause, one hypothesis per syntactic recursive call in its right-hand side.
pub fn computation_rule(env: &TheoryEnv, function: &str) -> Result<InductionRule, RuleError> {
    let f = env
        .function(function)
        .ok_or_else(|| RuleError::UnknownFunction(function.to_string()))?;
    let (arg_tys, _) = f.signature.uncurry();
    let cases = f
        .clauses
        .iter()
        .map(|clause| {
            let mut bindings = Vec::new();
            clause.lhs.vars_ordered(&mut bindings);
            let mut hyps = Vec::new();
            recursive_calls(&clause.rhs, &f.name, f.arity, &mut hyps);
            RuleCase {
                bindings,
                hyps,
                conclusion: clause.lhs.args().to_vec(),
            }
        })
        .collect();
    Ok(InductionRule {
        name: computation_rule_name(&f.name),
        arity: f.arity,
        position_types: arg_tys.into_iter().cloned().collect(),
        cases,
        kind: RuleKind::Computation {
            function: f.name.clone(),
        },
    })
}

/// Argument tuples of every full application of `name` in `t`, pre-order.
fn recursive_calls(t: &Term, name: &str, arity: usize, out: &mut Vec<Vec<Term>>) {
    if let Term::App(h, args) = t {
        if matches!(&**h, Term::Const(c) if c == name) && args.len() == arity {
            out.push(args.clone());
        }
        recursive_calls(h, name, arity, out);
        for a in args {
            recursive_calls(a, name, arity, out);
        }
    }
}

/// Rules relevant to an application headed by `head`: the function's own
/// computation rule, then handcrafted rules registered for the function,
/// then handcrafted rules registered for datatypes in its signature.
pub fn applicable_rules(env: &TheoryEnv, head: &str) -> Vec<String> {
    let Some(f) = env.function(head) else {
        return Vec::new();
    };
    let mut out = vec![computation_rule_name(&f.name)];
    let mut types = Vec::new();
    f.signature.datatype_names(&mut types);
    let handcrafted: Vec<&InductionRule> = env.rules.handcrafted().collect();
    for r in &handcrafted {
        if matches!(&r.kind, RuleKind::Handcrafted { target: RuleTarget::Function(t) } if *t == f.name) {
            out.push(r.name.clone());
        }
    }
    for ty in &types {
        for r in &handcrafted {
            if matches!(&r.kind, RuleKind::Handcrafted { target: RuleTarget::Datatype(t) } if t == ty) {
                out.push(r.name.clone());
            }
        }
    }
    let mut seen = BTreeSet::new();
    out.retain(|n| seen.insert(n.clone()));
    out
}

/// Renames type variables to `a`, `b`, ... in order of first appearance.
pub(crate) fn canonical_type_vars(types: &[Type]) -> Vec<Type> {
    fn go(t: &Type, names: &mut HashMap<String, String>) -> Type {
        match t {
            Type::Var(v) => {
                let n = names.len();
                let name = names
                    .entry(v.clone())
                    .or_insert_with(|| ((b'a' + (n % 26) as u8) as char).to_string());
                Type::Var(name.clone())
            }
            Type::Con(c, args) => Type::Con(c.clone(), args.iter().map(|a| go(a, names)).collect()),
            Type::Arrow(a, b) => Type::arrow(go(a, names), go(b, names)),
        }
    }
    let mut names = HashMap::new();
    types.iter().map(|t| go(t, &mut names)).collect()
}
