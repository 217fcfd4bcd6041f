//! Evaluation of heuristic expressions against goals and defining clauses.

use std::collections::{HashMap, HashSet};

use super::ast::{Arg, Domain, Expr, HeuristicSet, Kind, Predicate, QuantKind};
use super::HeuristicError;
use crate::frontend::{Candidate, Clause, TheoryEnv};
use crate::kernel::{subterm_at, Node, OccPath, Prop, Term};
use crate::rules::{RuleKind, RuleTarget};

/// Runtime values bound by quantifiers and parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Term(Term),
    Occ(OccPath),
    Num(usize),
    Rule(Option<String>),
    Str(String),
}

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Term(_) => Kind::Term,
            Value::Occ(_) => Kind::Occ,
            Value::Num(_) => Kind::Num,
            Value::Rule(_) => Kind::Rule,
            Value::Str(_) => Kind::Str,
        }
    }
}

/// A goal or defining clause with its nodes and subterms precomputed.
#[derive(Clone, Debug)]
pub struct TreeIndex {
    pub prop: Prop,
    /// Whether this is a defining clause `lhs = rhs`.
    pub clause: bool,
    paths: Vec<OccPath>,
    terms: Vec<Term>,
    occs: HashMap<Term, Vec<OccPath>>,
}

impl TreeIndex {
    pub fn goal(p: &Prop) -> TreeIndex {
        TreeIndex::build(p.clone(), false)
    }

    pub fn clause(c: &Clause) -> TreeIndex {
        TreeIndex::build(c.as_prop(), true)
    }

    fn build(prop: Prop, clause: bool) -> TreeIndex {
        let mut paths = Vec::new();
        let mut terms = Vec::new();
        let mut occs: HashMap<Term, Vec<OccPath>> = HashMap::new();
        for (path, node) in Node::from(&prop).all_nodes() {
            if let Node::Term(t) = node {
                let entry = occs.entry(t.clone()).or_default();
                if entry.is_empty() {
                    terms.push(t.clone());
                }
                entry.push(path.clone());
            }
            paths.push(path);
        }
        TreeIndex {
            prop,
            clause,
            paths,
            terms,
            occs,
        }
    }

    pub fn paths(&self) -> &[OccPath] {
        &self.paths
    }

    /// Distinct subterms in order of first occurrence.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn occurrences(&self, t: &Term) -> &[OccPath] {
        self.occs.get(t).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn node(&self, p: &OccPath) -> Option<Node<'_>> {
        subterm_at(&self.prop, p).ok()
    }
}

/// What an expression is evaluated against.
#[derive(Clone, Copy, Debug)]
pub struct EvalContext<'a> {
    pub tree: &'a TreeIndex,
    pub candidate: &'a Candidate,
}

/// Evaluates expressions of one heuristic set in one environment. Clause
/// indexes are built once and shared by every evaluation.
pub struct Evaluator<'a> {
    pub env: &'a TheoryEnv,
    pub set: &'a HeuristicSet,
    clauses: HashMap<String, Vec<TreeIndex>>,
    recursive: HashSet<String>,
    max_number: usize,
}

type Bindings = Vec<(String, Value)>;

fn mentions(t: &Term, name: &str) -> bool {
    match t {
        Term::Const(c) => c == name,
        Term::Var(_) => false,
        Term::App(h, args) => mentions(h, name) || args.iter().any(|a| mentions(a, name)),
    }
}

impl<'a> Evaluator<'a> {
    pub fn new(env: &'a TheoryEnv, set: &'a HeuristicSet) -> Evaluator<'a> {
        let clauses = env
            .functions
            .iter()
            .map(|f| (f.name.clone(), f.clauses.iter().map(TreeIndex::clause).collect()))
            .collect();
        let recursive = env
            .functions
            .iter()
            .filter(|f| f.clauses.iter().any(|c| mentions(&c.rhs, &f.name)))
            .map(|f| f.name.clone())
            .collect();
        Evaluator {
            env,
            set,
            clauses,
            recursive,
            max_number: env.max_arity(),
        }
    }

    /// Upper bound of the `numbers` domain.
    pub fn max_number(&self) -> usize {
        self.max_number
    }

    pub fn eval(&self, e: &Expr, ctx: &EvalContext<'_>) -> Result<bool, HeuristicError> {
        self.go(e, ctx, &mut Vec::new())
    }

    fn lookup(&self, name: &str, ctx: &EvalContext<'_>, b: &Bindings) -> Result<Value, HeuristicError> {
        if let Some((_, v)) = b.iter().rev().find(|(n, _)| n == name) {
            return Ok(v.clone());
        }
        if name == "rule_name" {
            return Ok(Value::Rule(ctx.candidate.rule.clone()));
        }
        Err(HeuristicError::UnboundVariable(name.to_string()))
    }

    fn arg(&self, a: &Arg, ctx: &EvalContext<'_>, b: &Bindings) -> Result<Value, HeuristicError> {
        match a {
            Arg::Var(v) => self.lookup(v, ctx, b),
            Arg::Num(n) => usize::try_from(*n)
                .map(Value::Num)
                .map_err(|_| HeuristicError::Domain(format!("negative number {n}"))),
            Arg::Str(s) => Ok(Value::Str(s.clone())),
        }
    }

    fn domain(&self, d: &Domain, ctx: &EvalContext<'_>, b: &Bindings) -> Result<Vec<Value>, HeuristicError> {
        Ok(match d {
            Domain::Terms => ctx.tree.terms().iter().cloned().map(Value::Term).collect(),
            Domain::Occurrences => ctx.tree.paths().iter().cloned().map(Value::Occ).collect(),
            Domain::OccurrencesOf(x) => {
                let v = self.lookup(x, ctx, b)?;
                match term_like(&v, ctx.tree)? {
                    Some(t) => ctx.tree.occurrences(&t).iter().cloned().map(Value::Occ).collect(),
                    None => Vec::new(),
                }
            }
            Domain::Numbers => (1..=self.max_number).map(Value::Num).collect(),
            Domain::ArbitraryTerms => ctx.candidate.arbitrary.iter().map(|v| Value::Term(Term::var(v.clone()))).collect(),
            Domain::InductionTerms => ctx.candidate.induction_terms.iter().cloned().map(Value::Term).collect(),
        })
    }

    fn go(&self, e: &Expr, ctx: &EvalContext<'_>, b: &mut Bindings) -> Result<bool, HeuristicError> {
        match e {
            Expr::Bool(v) => Ok(*v),
            Expr::Not(x) => Ok(!self.go(x, ctx, b)?),
            Expr::And(xs) => {
                for x in xs {
                    if !self.go(x, ctx, b)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Expr::Or(xs) => {
                for x in xs {
                    if self.go(x, ctx, b)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Expr::Implies(x, y) => Ok(!self.go(x, ctx, b)? || self.go(y, ctx, b)?),
            Expr::Quant { kind, var, domain, body } => {
                let values = self.domain(domain, ctx, b)?;
                let want = *kind == QuantKind::Exists;
                for v in values {
                    b.push((var.clone(), v));
                    let r = self.go(body, ctx, b);
                    b.pop();
                    if r? == want {
                        return Ok(want);
                    }
                }
                Ok(!want)
            }
            Expr::Atom { pred, args } => {
                let vals = args.iter().map(|a| self.arg(a, ctx, b)).collect::<Result<Vec<_>, _>>()?;
                self.atom(*pred, &vals, ctx)
            }
            Expr::DefQuant { target, callee, args } => {
                let assertion = self
                    .set
                    .assertions
                    .get(callee)
                    .ok_or_else(|| HeuristicError::UnknownAssertion(callee.clone()))?;
                if assertion.params.len() != args.len() {
                    return Err(HeuristicError::Domain(format!(
                        "assertion `{callee}` takes {} argument(s), got {}",
                        assertion.params.len(),
                        args.len()
                    )));
                }
                let target = self.lookup(target, ctx, b)?;
                let Some(Term::Const(f)) = term_like(&target, ctx.tree)? else {
                    return Ok(false);
                };
                let Some(clauses) = self.clauses.get(&f) else {
                    return Ok(false);
                };
                let mut inner: Bindings = Vec::with_capacity(args.len());
                for (p, a) in assertion.params.iter().zip(args) {
                    inner.push((p.clone(), self.arg(a, ctx, b)?));
                }
                for tree in clauses {
                    let cctx = EvalContext {
                        tree,
                        candidate: ctx.candidate,
                    };
                    if self.go(&assertion.body, &cctx, &mut inner)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    fn atom(&self, pred: Predicate, vals: &[Value], ctx: &EvalContext<'_>) -> Result<bool, HeuristicError> {
        let params = pred.params();
        if params.len() != vals.len() {
            return Err(HeuristicError::Domain(format!("`{}` takes {} argument(s)", pred.name(), params.len())));
        }
        for (v, p) in vals.iter().zip(params) {
            if !p.accepts(v.kind()) {
                return Err(HeuristicError::Domain(format!("`{}` cannot take a {}", pred.name(), v.kind())));
            }
        }
        let tree = ctx.tree;
        let term = |i: usize| term_like(&vals[i], tree);
        let occ = |i: usize| match &vals[i] {
            Value::Occ(o) => o,
            _ => unreachable!("kinds checked above"),
        };
        let num = |i: usize| match &vals[i] {
            Value::Num(n) => *n,
            _ => unreachable!("kinds checked above"),
        };
        let string = |i: usize| match &vals[i] {
            Value::Str(s) => s.as_str(),
            _ => unreachable!("kinds checked above"),
        };
        let rule = |i: usize| match &vals[i] {
            Value::Rule(r) => r.as_deref(),
            _ => unreachable!("kinds checked above"),
        };
        let const_name = |t: Option<Term>| match t {
            Some(Term::Const(c)) => Some(c),
            _ => None,
        };
        Ok(match pred {
            Predicate::IsNthArgumentOf | Predicate::IsOrBelowNthArgumentOf => {
                let (o, n, f) = (occ(0), num(1), occ(2));
                match nth_argument_path(tree, f, n) {
                    Some(arg) if pred == Predicate::IsNthArgumentOf => arg == *o,
                    Some(arg) => arg.is_prefix_of(o),
                    None => false,
                }
            }
            Predicate::IsLeftHandSide | Predicate::IsRightHandSide => {
                if !tree.clause {
                    return Err(HeuristicError::Context(format!("`{}` outside a defining clause", pred.name())));
                }
                let side = if pred == Predicate::IsLeftHandSide { 1 } else { 2 };
                occ(0).indices().first() == Some(&side)
            }
            Predicate::AreOfSameTerm => match (node_of(&vals[0], tree), node_of(&vals[1], tree)) {
                (Some(a), Some(b)) => a.same_as(b),
                _ => false,
            },
            Predicate::IsVariable => matches!(term(0)?, Some(Term::Var(_))),
            Predicate::IsConstant => matches!(term(0)?, Some(Term::Const(_))),
            Predicate::IsConstructor => const_name(term(0)?).is_some_and(|c| self.env.is_constructor(&c)),
            Predicate::IsDefinedFunction => const_name(term(0)?).is_some_and(|c| self.clauses.get(&c).is_some_and(|cs| !cs.is_empty())),
            Predicate::IsRecursiveFunction => const_name(term(0)?).is_some_and(|c| self.recursive.contains(&c)),
            Predicate::IsCompound => matches!(term(0)?, Some(Term::App(..))),
            Predicate::OccursIn => match (term(0)?, term(1)?) {
                (Some(a), Some(b)) => b.contains(&a),
                _ => false,
            },
            Predicate::HeadOf => match (term(0)?, term(1)?) {
                (Some(f), Some(t @ Term::App(..))) => *t.head() == f,
                _ => false,
            },
            Predicate::IsInductionTerm => term(0)?.is_some_and(|t| ctx.candidate.induction_terms.contains(&t)),
            Predicate::IsNthInductionTerm => {
                let n = num(1);
                n >= 1 && term(0)?.is_some_and(|t| ctx.candidate.induction_terms.get(n - 1) == Some(&t))
            }
            Predicate::IsInArbitrary => matches!(term(0)?, Some(Term::Var(v)) if ctx.candidate.arbitrary.contains(&v)),
            Predicate::IsNamed => match term(0)? {
                Some(Term::Var(n)) | Some(Term::Const(n)) => n == string(1),
                _ => false,
            },
            Predicate::PatternMatchesOn => {
                let n = num(1);
                match const_name(term(0)?).and_then(|c| self.env.function(&c)) {
                    Some(f) if n >= 1 && n <= f.arity => f.clauses.iter().any(|c| !c.lhs.args()[n - 1].is_var()),
                    _ => false,
                }
            }
            Predicate::HasRule => rule(0).is_some(),
            Predicate::RuleOfFunction => {
                let f = const_name(term(1)?);
                match (rule(0).and_then(|r| self.env.rule(r)), f) {
                    (Some(r), Some(f)) => match &r.kind {
                        RuleKind::Computation { function } => *function == f,
                        RuleKind::Handcrafted { target: RuleTarget::Function(g) } => *g == f,
                        _ => false,
                    },
                    _ => false,
                }
            }
            Predicate::IsStructuralRule => self.rule_kind(rule(0), |k| matches!(k, RuleKind::Structural { .. })),
            Predicate::IsComputationRule => self.rule_kind(rule(0), |k| matches!(k, RuleKind::Computation { .. })),
            Predicate::IsHandcraftedRule => self.rule_kind(rule(0), |k| matches!(k, RuleKind::Handcrafted { .. })),
            Predicate::RuleIs => rule(0) == Some(string(1)),
            Predicate::NumberIs => num(0) == num(1),
        })
    }

    fn rule_kind(&self, rule: Option<&str>, f: impl Fn(&RuleKind) -> bool) -> bool {
        rule.and_then(|r| self.env.rule(r)).is_some_and(|r| f(&r.kind))
    }
}

/// Path of the `n`-th argument of the application whose head is at `head`.
fn nth_argument_path(tree: &TreeIndex, head: &OccPath, n: usize) -> Option<OccPath> {
    if head.last() != Some(0) || n == 0 {
        return None;
    }
    let app = head.parent()?;
    match tree.node(&app)? {
        Node::Term(Term::App(_, args)) if n <= args.len() => Some(app.child(n)),
        _ => None,
    }
}

fn node_of<'t>(v: &'t Value, tree: &'t TreeIndex) -> Option<Node<'t>> {
    match v {
        Value::Term(t) => Some(Node::Term(t)),
        Value::Occ(o) => tree.node(o),
        _ => None,
    }
}

/// The term a term-like value stands for; `None` for an occurrence of a
/// proposition node.
fn term_like(v: &Value, tree: &TreeIndex) -> Result<Option<Term>, HeuristicError> {
    match v {
        Value::Term(t) => Ok(Some(t.clone())),
        Value::Occ(o) => match tree.node(o) {
            Some(Node::Term(t)) => Ok(Some(t.clone())),
            Some(Node::Prop(_)) => Ok(None),
            None => Err(HeuristicError::Domain(format!("occurrence {o} is not in the current tree"))),
        },
        other => Err(HeuristicError::Domain(format!("expected a term, got a {}", other.kind()))),
    }
}
