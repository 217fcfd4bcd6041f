//! A reference interpreter for heuristic expressions and a generator of
//! random well-scoped expressions. The interpreter evaluates every
//! subexpression and every domain element, recomputes domains from the
//! proposition on each use, and shares no code with the production
//! evaluator.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use indrec_core::candidates::generate;
use indrec_core::frontend::{parse_theory, Candidate, ParseOptions, TheoryEnv};
use indrec_core::heuristics::{Arg, Assertion, Domain, Expr, HeuristicSet, Kind, Param, Predicate, QuantKind};
use indrec_core::kernel::{Prop, Term};
use indrec_core::rules::{RuleKind, RuleTarget};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Debug, PartialEq)]
pub enum V {
    T(Term),
    O(Vec<usize>),
    N(usize),
    R(Option<String>),
    S(String),
}

#[derive(Clone, Copy)]
pub enum At<'a> {
    P(&'a Prop),
    T(&'a Term),
}

pub fn at<'a>(p: &'a Prop, path: &[usize]) -> Option<At<'a>> {
    let mut here = At::P(p);
    for &i in path {
        here = match (here, i) {
            (At::P(Prop::Eq(l, _)), 1) => At::T(l),
            (At::P(Prop::Eq(_, r)), 2) => At::T(r),
            (At::P(Prop::Imp(a, _)), 1) => At::P(a),
            (At::P(Prop::Imp(_, c)), 2) => At::P(c),
            (At::P(Prop::Forall(_, b)), 1) => At::P(b),
            (At::T(Term::App(h, _)), 0) => At::T(h),
            (At::T(Term::App(_, args)), i) if i <= args.len() => At::T(&args[i - 1]),
            _ => return None,
        };
    }
    Some(here)
}

pub fn paths(p: &Prop) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![Vec::new()];
    while let Some(path) = stack.pop() {
        for i in 0..8 {
            let mut c = path.clone();
            c.push(i);
            if at(p, &c).is_some() {
                stack.push(c);
            }
        }
        out.push(path);
    }
    out
}

pub fn subterm(t: &Term, needle: &Term) -> bool {
    t == needle
        || match t {
            Term::App(h, args) => subterm(h, needle) || args.iter().any(|a| subterm(a, needle)),
            _ => false,
        }
}

pub struct Oracle<'a> {
    pub env: &'a TheoryEnv,
    pub set: &'a HeuristicSet,
}

pub struct Ctx<'a> {
    pub prop: &'a Prop,
    pub clause: bool,
    pub cand: &'a Candidate,
}

impl Oracle<'_> {
    pub fn term_of(&self, v: &V, ctx: &Ctx<'_>) -> Option<Term> {
        match v {
            V::T(t) => Some(t.clone()),
            V::O(o) => match at(ctx.prop, o).expect("occurrence in tree") {
                At::T(t) => Some(t.clone()),
                At::P(_) => None,
            },
            _ => panic!("not term-like: {v:?}"),
        }
    }

    fn domain(&self, d: &Domain, ctx: &Ctx<'_>, env: &HashMap<String, V>) -> Vec<V> {
        let all = paths(ctx.prop);
        match d {
            Domain::Terms => {
                let mut ts: Vec<Term> = Vec::new();
                for p in &all {
                    if let Some(At::T(t)) = at(ctx.prop, p) {
                        if !ts.contains(t) {
                            ts.push(t.clone());
                        }
                    }
                }
                ts.into_iter().map(V::T).collect()
            }
            Domain::Occurrences => all.into_iter().map(V::O).collect(),
            Domain::OccurrencesOf(x) => match self.term_of(&self.var(x, ctx, env), ctx) {
                Some(t) => all.into_iter().filter(|p| matches!(at(ctx.prop, p), Some(At::T(u)) if *u == t)).map(V::O).collect(),
                None => Vec::new(),
            },
            Domain::Numbers => {
                let mut m = 0;
                for d in &self.env.datatypes {
                    for c in &d.ctors {
                        m = m.max(c.args.len());
                    }
                }
                for f in &self.env.functions {
                    m = m.max(f.arity);
                }
                (1..=m).map(V::N).collect()
            }
            Domain::ArbitraryTerms => ctx.cand.arbitrary.iter().map(|v| V::T(Term::var(v.as_str()))).collect(),
            Domain::InductionTerms => ctx.cand.induction_terms.iter().cloned().map(V::T).collect(),
        }
    }

    fn var(&self, x: &str, ctx: &Ctx<'_>, env: &HashMap<String, V>) -> V {
        match env.get(x) {
            Some(v) => v.clone(),
            None if x == "rule_name" => V::R(ctx.cand.rule.clone()),
            None => panic!("unbound {x}"),
        }
    }

    fn arg(&self, a: &Arg, ctx: &Ctx<'_>, env: &HashMap<String, V>) -> V {
        match a {
            Arg::Var(x) => self.var(x, ctx, env),
            Arg::Num(n) => V::N(*n as usize),
            Arg::Str(s) => V::S(s.clone()),
        }
    }

    pub fn eval(&self, e: &Expr, ctx: &Ctx<'_>, env: &HashMap<String, V>) -> bool {
        match e {
            Expr::Bool(b) => *b,
            Expr::Not(x) => !self.eval(x, ctx, env),
            Expr::And(xs) => {
                let rs: Vec<bool> = xs.iter().map(|x| self.eval(x, ctx, env)).collect();
                rs.into_iter().all(|r| r)
            }
            Expr::Or(xs) => {
                let rs: Vec<bool> = xs.iter().map(|x| self.eval(x, ctx, env)).collect();
                rs.into_iter().any(|r| r)
            }
            Expr::Implies(a, b) => {
                let (a, b) = (self.eval(a, ctx, env), self.eval(b, ctx, env));
                !a || b
            }
            Expr::Quant { kind, var, domain, body } => {
                let rs: Vec<bool> = self
                    .domain(domain, ctx, env)
                    .into_iter()
                    .map(|v| {
                        let mut inner = env.clone();
                        inner.insert(var.clone(), v);
                        self.eval(body, ctx, &inner)
                    })
                    .collect();
                match kind {
                    QuantKind::Forall => rs.into_iter().all(|r| r),
                    QuantKind::Exists => rs.into_iter().any(|r| r),
                }
            }
            Expr::DefQuant { target, callee, args } => {
                let a = &self.set.assertions[callee];
                let Some(Term::Const(f)) = self.term_of(&self.var(target, ctx, env), ctx) else {
                    return false;
                };
                let Some(fun) = self.env.functions.iter().find(|g| g.name == f) else {
                    return false;
                };
                let inner: HashMap<String, V> = a.params.iter().cloned().zip(args.iter().map(|x| self.arg(x, ctx, env))).collect();
                let rs: Vec<bool> = fun
                    .clauses
                    .iter()
                    .map(|c| {
                        let prop = Prop::Eq(c.lhs.clone(), c.rhs.clone());
                        self.eval(&a.body, &Ctx { prop: &prop, clause: true, cand: ctx.cand }, &inner)
                    })
                    .collect();
                rs.into_iter().any(|r| r)
            }
            Expr::Atom { pred, args } => {
                let vs: Vec<V> = args.iter().map(|a| self.arg(a, ctx, env)).collect();
                self.atom(*pred, &vs, ctx)
            }
        }
    }

    fn atom(&self, pred: Predicate, vs: &[V], ctx: &Ctx<'_>) -> bool {
        let t = |i: usize| self.term_of(&vs[i], ctx);
        let o = |i: usize| match &vs[i] {
            V::O(p) => p.clone(),
            v => panic!("{v:?}"),
        };
        let n = |i: usize| match &vs[i] {
            V::N(n) => *n,
            v => panic!("{v:?}"),
        };
        let s = |i: usize| match &vs[i] {
            V::S(s) => s.clone(),
            v => panic!("{v:?}"),
        };
        let r = |i: usize| match &vs[i] {
            V::R(r) => r.clone(),
            v => panic!("{v:?}"),
        };
        let cname = |x: Option<Term>| match x {
            Some(Term::Const(c)) => Some(c),
            _ => None,
        };
        let func = |x: Option<Term>| cname(x).and_then(|c| self.env.functions.iter().find(|f| f.name == c));
        let argument_root = |head: &[usize], k: usize| -> Option<Vec<usize>> {
            let (last, app) = head.split_last()?;
            if *last != 0 || k == 0 {
                return None;
            }
            match at(ctx.prop, app)? {
                At::T(Term::App(_, args)) if k <= args.len() => {
                    let mut p = app.to_vec();
                    p.push(k);
                    Some(p)
                }
                _ => None,
            }
        };
        match pred {
            Predicate::IsNthArgumentOf => argument_root(&o(2), n(1)) == Some(o(0)),
            Predicate::IsOrBelowNthArgumentOf => argument_root(&o(2), n(1)).is_some_and(|p| o(0).starts_with(&p)),
            Predicate::IsLeftHandSide => {
                assert!(ctx.clause);
                o(0).first() == Some(&1)
            }
            Predicate::IsRightHandSide => {
                assert!(ctx.clause);
                o(0).first() == Some(&2)
            }
            Predicate::AreOfSameTerm => {
                fn node<'x>(v: &'x V, prop: &'x Prop) -> Option<At<'x>> {
                    match v {
                        V::T(t) => Some(At::T(t)),
                        V::O(p) => at(prop, p),
                        _ => None,
                    }
                }
                match (node(&vs[0], ctx.prop), node(&vs[1], ctx.prop)) {
                    (Some(At::T(a)), Some(At::T(b))) => a == b,
                    (Some(At::P(a)), Some(At::P(b))) => a == b,
                    _ => false,
                }
            }
            Predicate::IsVariable => matches!(t(0), Some(Term::Var(_))),
            Predicate::IsConstant => matches!(t(0), Some(Term::Const(_))),
            Predicate::IsConstructor => {
                cname(t(0)).is_some_and(|c| self.env.datatypes.iter().any(|d| d.ctors.iter().any(|k| k.name == c)))
            }
            Predicate::IsDefinedFunction => func(t(0)).is_some_and(|f| !f.clauses.is_empty()),
            Predicate::IsRecursiveFunction => func(t(0)).is_some_and(|f| {
                let me = Term::constant(f.name.as_str());
                f.clauses.iter().any(|c| subterm(&c.rhs, &me))
            }),
            Predicate::IsCompound => matches!(t(0), Some(Term::App(..))),
            Predicate::OccursIn => match (t(0), t(1)) {
                (Some(a), Some(b)) => subterm(&b, &a),
                _ => false,
            },
            Predicate::HeadOf => match (t(0), t(1)) {
                (Some(f), Some(Term::App(h, _))) => *h == f,
                _ => false,
            },
            Predicate::IsInductionTerm => t(0).is_some_and(|x| ctx.cand.induction_terms.iter().any(|y| *y == x)),
            Predicate::IsNthInductionTerm => {
                let k = n(1);
                k >= 1 && k <= ctx.cand.induction_terms.len() && t(0) == Some(ctx.cand.induction_terms[k - 1].clone())
            }
            Predicate::IsInArbitrary => matches!(t(0), Some(Term::Var(v)) if ctx.cand.arbitrary.iter().any(|a| *a == v)),
            Predicate::IsNamed => match t(0) {
                Some(Term::Var(x)) | Some(Term::Const(x)) => x == s(1),
                _ => false,
            },
            Predicate::PatternMatchesOn => {
                let k = n(1);
                func(t(0)).is_some_and(|f| {
                    k >= 1
                        && k <= f.arity
                        && f.clauses.iter().any(|c| match &c.lhs {
                            Term::App(_, args) => !matches!(args[k - 1], Term::Var(_)),
                            _ => false,
                        })
                })
            }
            Predicate::HasRule => r(0).is_some(),
            Predicate::RuleOfFunction => {
                let f = cname(t(1));
                match (r(0).and_then(|x| self.env.rules.get(&x).cloned()), f) {
                    (Some(rule), Some(f)) => match rule.kind {
                        RuleKind::Computation { function } => function == f,
                        RuleKind::Handcrafted { target: RuleTarget::Function(g) } => g == f,
                        _ => false,
                    },
                    _ => false,
                }
            }
            Predicate::IsStructuralRule => self.kind_of(r(0)).is_some_and(|k| matches!(k, RuleKind::Structural { .. })),
            Predicate::IsComputationRule => self.kind_of(r(0)).is_some_and(|k| matches!(k, RuleKind::Computation { .. })),
            Predicate::IsHandcraftedRule => self.kind_of(r(0)).is_some_and(|k| matches!(k, RuleKind::Handcrafted { .. })),
            Predicate::RuleIs => r(0) == Some(s(1)),
            Predicate::NumberIs => n(0) == n(1),
        }
    }

    fn kind_of(&self, r: Option<String>) -> Option<RuleKind> {
        r.and_then(|x| self.env.rules.get(&x).map(|rule| rule.kind.clone()))
    }
}

// ---------------------------------------------------------------------------
// Random well-scoped expressions.

pub struct Gen<'r> {
    pub rng: &'r mut StdRng,
    pub fresh: usize,
    /// (name, parameter kinds) of the available assertions.
    pub assertions: Vec<(String, Vec<Kind>)>,
}

pub const STRINGS: &[&str] = &["Cons", "Nil", "xs", "ys", "rev2", "append", "rev2.induct", "nat_induct2", "Zero"];

impl Gen<'_> {
    pub fn expr(&mut self, scope: &mut Vec<(String, Kind)>, depth: usize, quants: usize, clause: bool) -> Expr {
        let roll = self.rng.gen_range(0..10);
        if depth == 0 || roll < 3 {
            return self.atom(scope, clause);
        }
        match roll {
            3 => Expr::Not(Box::new(self.expr(scope, depth - 1, quants, clause))),
            4 => {
                let n = self.rng.gen_range(0..4);
                Expr::And((0..n).map(|_| self.expr(scope, depth - 1, quants, clause)).collect())
            }
            5 => {
                let n = self.rng.gen_range(0..4);
                Expr::Or((0..n).map(|_| self.expr(scope, depth - 1, quants, clause)).collect())
            }
            6 => Expr::Implies(
                Box::new(self.expr(scope, depth - 1, quants, clause)),
                Box::new(self.expr(scope, depth - 1, quants, clause)),
            ),
            7 if !clause && !self.assertions.is_empty() => self.def_quant(scope).unwrap_or_else(|| self.atom(scope, clause)),
            _ if quants > 0 => self.quant(scope, depth, quants, clause),
            _ => self.atom(scope, clause),
        }
    }

    fn quant(&mut self, scope: &mut Vec<(String, Kind)>, depth: usize, quants: usize, clause: bool) -> Expr {
        let term_vars: Vec<String> = scope.iter().filter(|(_, k)| Param::TermLike.accepts(*k)).map(|(n, _)| n.clone()).collect();
        let mut domains = vec![(Domain::Terms, Kind::Term), (Domain::Occurrences, Kind::Occ), (Domain::Numbers, Kind::Num)];
        if !clause {
            domains.push((Domain::ArbitraryTerms, Kind::Term));
            domains.push((Domain::InductionTerms, Kind::Term));
        }
        for v in term_vars {
            domains.push((Domain::OccurrencesOf(v), Kind::Occ));
        }
        let (domain, kind) = domains.choose(self.rng).unwrap().clone();
        self.fresh += 1;
        let var = format!("v{}", self.fresh);
        scope.push((var.clone(), kind));
        let body = self.expr(scope, depth - 1, quants - 1, clause);
        scope.pop();
        Expr::Quant {
            kind: if self.rng.gen_bool(0.5) { QuantKind::Forall } else { QuantKind::Exists },
            var,
            domain,
            body: Box::new(body),
        }
    }

    fn pick(&mut self, scope: &[(String, Kind)], p: Param) -> Option<Arg> {
        let vars: Vec<&String> = scope.iter().filter(|(_, k)| p.accepts(*k)).map(|(n, _)| n).collect();
        match p {
            Param::Num if vars.is_empty() || self.rng.gen_bool(0.3) => Some(Arg::Num(self.rng.gen_range(0..4))),
            Param::Str => Some(Arg::Str(STRINGS.choose(self.rng).unwrap().to_string())),
            Param::Rule => Some(Arg::Var("rule_name".into())),
            _ => vars.choose(self.rng).map(|v| Arg::Var((*v).clone())),
        }
    }

    fn atom(&mut self, scope: &[(String, Kind)], clause: bool) -> Expr {
        for _ in 0..20 {
            let pred = *Predicate::ALL.choose(self.rng).unwrap();
            if !clause && matches!(pred, Predicate::IsLeftHandSide | Predicate::IsRightHandSide) {
                continue;
            }
            let args: Option<Vec<Arg>> = pred.params().iter().map(|p| self.pick(scope, *p)).collect();
            if let Some(args) = args {
                return Expr::Atom { pred, args };
            }
        }
        Expr::Bool(self.rng.gen_bool(0.5))
    }

    fn def_quant(&mut self, scope: &[(String, Kind)]) -> Option<Expr> {
        let targets: Vec<&String> = scope.iter().filter(|(_, k)| *k == Kind::Term).map(|(n, _)| n).collect();
        let target = (*targets.choose(self.rng)?).clone();
        let (callee, kinds) = self.assertions.choose(self.rng)?.clone();
        let mut args = Vec::new();
        for k in kinds {
            args.push(match k {
                Kind::Num => self.pick(scope, Param::Num)?,
                _ => Arg::Var(targets.choose(self.rng)?.to_string()),
            });
        }
        Some(Expr::DefQuant { target, callee, args })
    }
}

pub fn random_set(rng: &mut StdRng) -> HeuristicSet {
    let mut set = HeuristicSet::default();
    let specs = [("a_num_term", vec![Kind::Num, Kind::Term]), ("a_term", vec![Kind::Term])];
    for (name, kinds) in specs {
        let mut g = Gen {
            rng,
            fresh: 100,
            assertions: Vec::new(),
        };
        let params: Vec<String> = (0..kinds.len()).map(|i| format!("p{i}")).collect();
        let mut scope: Vec<(String, Kind)> = params.iter().cloned().zip(kinds.iter().copied()).collect();
        let body = g.expr(&mut scope, 4, 2, true);
        set.assertions.insert(name.to_string(), Assertion { name: name.to_string(), params, body });
    }
    set
}

/// Up to three goals with at most six applications per source, each with
/// some generated candidates and their fully generalised variants.
pub fn contexts(sources: &[(String, String)]) -> Vec<(TheoryEnv, Prop, Vec<Candidate>)> {
    let mut out = Vec::new();
    for (_, src) in sources {
        let env = parse_theory(src, &ParseOptions::default()).unwrap();
        for g in env.goals.iter().filter(|g| g.prop.app_count() <= 6).take(3) {
            let prop = g.prop.clone();
            let mut cs: Vec<Candidate> = generate(&env, &prop).into_iter().take(6).collect();
            let vars: Vec<String> = prop.free_vars().into_iter().collect();
            for c in cs.clone() {
                let used: BTreeSet<String> = c.induction_terms.iter().flat_map(|t| t.vars()).collect();
                let arbitrary: BTreeSet<String> = vars.iter().filter(|v| !used.contains(*v)).cloned().collect();
                if !arbitrary.is_empty() {
                    cs.push(Candidate { arbitrary, ..c });
                }
            }
            out.push((env.clone(), prop, cs));
        }
    }
    out
}

pub const ASSERTION_KINDS: &[(&str, &[Kind])] = &[("a_num_term", &[Kind::Num, Kind::Term]), ("a_term", &[Kind::Term])];

/// Evaluates `pairs` random expressions on random contexts with both
/// interpreters. Returns the disagreements, rendered, and how many
/// expressions were true.
pub fn random_agreement(sources: &[(String, String)], pairs: usize, seed: u64) -> (Vec<String>, usize) {
    use indrec_core::heuristics::{EvalContext, Evaluator, TreeIndex};
    use rand::SeedableRng;

    let ctxs = contexts(sources);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut bad = Vec::new();
    let mut trues = 0;
    for _ in 0..pairs {
        let set = random_set(&mut rng);
        let assertions = ASSERTION_KINDS.iter().map(|(n, k)| (n.to_string(), k.to_vec())).collect();
        let mut g = Gen {
            rng: &mut rng,
            fresh: 0,
            assertions,
        };
        let e = g.expr(&mut Vec::new(), 6, 3, false);
        let (env, prop, cs) = ctxs.choose(&mut rng).unwrap();
        let c = cs.choose(&mut rng).unwrap();
        let ev = Evaluator::new(env, &set);
        let tree = TreeIndex::goal(prop);
        let ctx = EvalContext { tree: &tree, candidate: c };
        let slow = Oracle { env, set: &set }.eval(&e, &Ctx { prop, clause: false, cand: c }, &HashMap::new());
        match ev.eval(&e, &ctx) {
            // a second run checks that evaluation is pure
            Ok(fast) if fast == slow && ev.eval(&e, &ctx).ok() == Some(fast) => trues += fast as usize,
            other => bad.push(format!("{e} on {prop} with {c}: {other:?} vs {slow}")),
        }
    }
    (bad, trues)
}
