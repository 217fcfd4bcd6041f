use std::collections::{BTreeSet, HashMap};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::candidate::{parse_candidate, Candidate};
use super::syntax::{Item, Parser, Pos, RawProp, RawRuleCase, RawTerm, RawType};
use super::FrontendError;
use crate::kernel::{Prop, Signature, Term, Type, Typing};
use crate::rules::{
    canonical_type_vars, computation_rule, structural_rule, InductionRule, RuleCase, RuleKind, RuleRegistry,
    RuleTarget,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constructor {
    pub name: String,
    pub args: Vec<Type>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Datatype {
    pub name: String,
    pub params: Vec<String>,
    pub ctors: Vec<Constructor>,
    pub from_prelude: bool,
}

impl Datatype {
    /// The datatype applied to its own parameters, e.g. `list a`.
    pub fn self_type(&self) -> Type {
        Type::con(self.name.clone(), self.params.iter().map(Type::var).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub lhs: Term,
    pub rhs: Term,
}

impl Clause {
    pub fn as_prop(&self) -> Prop {
        Prop::eq(self.lhs.clone(), self.rhs.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Function {
    pub name: String,
    pub signature: Type,
    pub arity: usize,
    pub clauses: Vec<Clause>,
    pub from_prelude: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goal {
    pub name: String,
    pub prop: Prop,
    pub expect: Option<String>,
    pub expected: Option<Candidate>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum ConstInfo {
    Constructor { datatype: usize, ty: Type },
    Function { index: usize, ty: Type },
}

/// An elaborated, type-checked theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryEnv {
    pub datatypes: Vec<Datatype>,
    pub functions: Vec<Function>,
    pub goals: Vec<Goal>,
    pub rules: RuleRegistry,
    consts: HashMap<String, ConstInfo>,
}

impl Signature for TheoryEnv {
    fn const_type(&self, name: &str) -> Option<&Type> {
        self.consts.get(name).map(|c| match c {
            ConstInfo::Constructor { ty, .. } | ConstInfo::Function { ty, .. } => ty,
        })
    }
}

impl TheoryEnv {
    pub fn datatype(&self, name: &str) -> Option<&Datatype> {
        self.datatypes.iter().find(|d| d.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&Function> {
        match self.consts.get(name) {
            Some(ConstInfo::Function { index, .. }) => self.functions.get(*index),
            _ => None,
        }
    }

    pub fn goal(&self, name: &str) -> Option<&Goal> {
        self.goals.iter().find(|g| g.name == name)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.consts.contains_key(name)
    }

    pub fn is_constructor(&self, name: &str) -> bool {
        matches!(self.consts.get(name), Some(ConstInfo::Constructor { .. }))
    }

    pub fn is_function(&self, name: &str) -> bool {
        matches!(self.consts.get(name), Some(ConstInfo::Function { .. }))
    }

    /// Datatype declaring constructor `name`.
    pub fn constructor_datatype(&self, name: &str) -> Option<&Datatype> {
        match self.consts.get(name) {
            Some(ConstInfo::Constructor { datatype, .. }) => self.datatypes.get(*datatype),
            _ => None,
        }
    }

    pub fn rule(&self, name: &str) -> Option<&InductionRule> {
        self.rules.get(name)
    }

    /// Largest argument count over all constructors and functions.
    pub fn max_arity(&self) -> usize {
        let ctors = self.datatypes.iter().flat_map(|d| d.ctors.iter().map(|c| c.args.len()));
        let funs = self.functions.iter().map(|f| f.arity);
        ctors.chain(funs).max().unwrap_or(0)
    }

    /// Resolves identifiers of an already parsed term against this
    /// environment: declared names become constants, all others variables.
    pub(crate) fn resolve_term(&self, raw: &RawTerm) -> Result<Term, FrontendError> {
        resolve_term(&self.consts, raw)
    }

    /// Parses a proposition in theory syntax and resolves it in this
    /// environment. Quantifiers are accepted here; only goals reject them.
    pub fn parse_prop(&self, text: &str) -> Result<Prop, FrontendError> {
        let mut p = Parser::new(text)?;
        let raw = p.prop()?;
        if !p.at_eof() {
            return p.error(&["end of proposition"]);
        }
        let prop = resolve_prop(&self.consts, &raw)?;
        Typing::new(self).check_prop(&prop).map_err(|e| FrontendError::Type(e.to_string()))?;
        Ok(prop)
    }

    /// Parses a term in theory syntax, resolved in this environment.
    pub fn parse_term(&self, text: &str) -> Result<Term, FrontendError> {
        let mut p = Parser::new(text)?;
        let raw = p.term()?;
        if !p.at_eof() {
            return p.error(&["end of term"]);
        }
        self.resolve_term(&raw)
    }
}

fn resolve_term(consts: &HashMap<String, ConstInfo>, raw: &RawTerm) -> Result<Term, FrontendError> {
    match raw {
        RawTerm::Ident(n, _) => Ok(if consts.contains_key(n) { Term::constant(n.clone()) } else { Term::var(n.clone()) }),
        RawTerm::App(h, args) => {
            let head = resolve_term(consts, h)?;
            if let Term::Var(v) = head.head() {
                return Err(FrontendError::Scope(format!("{}: unknown function `{v}`", h.pos())));
            }
            let args = args.iter().map(|a| resolve_term(consts, a)).collect::<Result<Vec<_>, _>>()?;
            Ok(Term::app(head, args))
        }
    }
}

fn resolve_prop(consts: &HashMap<String, ConstInfo>, raw: &RawProp) -> Result<Prop, FrontendError> {
    Ok(match raw {
        RawProp::Eq(l, r) => Prop::eq(resolve_term(consts, l)?, resolve_term(consts, r)?),
        RawProp::Imp(a, c) => Prop::imp(resolve_prop(consts, a)?, resolve_prop(consts, c)?),
        RawProp::Forall(x, b) => Prop::forall(x.clone(), resolve_prop(consts, b)?),
    })
}

fn raw_has_forall(raw: &RawProp) -> bool {
    match raw {
        RawProp::Eq(..) => false,
        RawProp::Imp(a, c) => raw_has_forall(a) || raw_has_forall(c),
        RawProp::Forall(..) => true,
    }
}

struct TypeScope<'a> {
    arities: &'a HashMap<String, usize>,
    /// When set, type variables must come from this list.
    params: Option<&'a [String]>,
}

fn resolve_type(scope: &TypeScope<'_>, raw: &RawType) -> Result<Type, FrontendError> {
    match raw {
        RawType::Arrow(a, b) => Ok(Type::arrow(resolve_type(scope, a)?, resolve_type(scope, b)?)),
        RawType::Name(n, args, pos) => {
            if let Some(&arity) = scope.arities.get(n) {
                if arity != args.len() {
                    return Err(FrontendError::Type(format!(
                        "{pos}: datatype `{n}` expects {arity} argument(s), got {}",
                        args.len()
                    )));
                }
                let args = args.iter().map(|a| resolve_type(scope, a)).collect::<Result<_, _>>()?;
                return Ok(Type::con(n.clone(), args));
            }
            if !args.is_empty() {
                return Err(FrontendError::Scope(format!("{pos}: unknown type constructor `{n}`")));
            }
            if let Some(params) = scope.params {
                if !params.contains(n) {
                    return Err(FrontendError::Scope(format!("{pos}: unbound type variable `{n}`")));
                }
            }
            Ok(Type::var(n.clone()))
        }
    }
}

fn scope_err<T>(pos: Pos, msg: impl fmt::Display) -> Result<T, FrontendError> {
    Err(FrontendError::Scope(format!("{pos}: {msg}")))
}

/// Options for [`elaborate`]: whether to import the prelude.
pub(crate) struct Sources<'a> {
    pub prelude: Option<&'a [Item]>,
    pub user: &'a [Item],
}

pub(crate) fn elaborate(src: Sources<'_>) -> Result<TheoryEnv, FrontendError> {
    let tagged: Vec<(&Item, bool)> = src
        .prelude
        .unwrap_or(&[])
        .iter()
        .map(|i| (i, true))
        .chain(src.user.iter().map(|i| (i, false)))
        .collect();

    // datatypes
    let mut arities: HashMap<String, usize> = HashMap::new();
    for (item, _) in &tagged {
        if let Item::Datatype { name, params, pos, .. } = item {
            if arities.insert(name.clone(), params.len()).is_some() {
                return scope_err(*pos, format_args!("duplicate datatype `{name}`"));
            }
        }
    }
    let mut consts: HashMap<String, ConstInfo> = HashMap::new();
    let mut datatypes = Vec::new();
    for (item, from_prelude) in &tagged {
        let Item::Datatype { name, params, ctors, pos } = item else { continue };
        let uniq: BTreeSet<_> = params.iter().collect();
        if uniq.len() != params.len() {
            return scope_err(*pos, format_args!("duplicate type parameter in `{name}`"));
        }
        let scope = TypeScope {
            arities: &arities,
            params: Some(params),
        };
        let self_ty = Type::con(name.clone(), params.iter().map(Type::var).collect());
        let mut out = Vec::new();
        for (cname, args, cpos) in ctors {
            let args = args.iter().map(|a| resolve_type(&scope, a)).collect::<Result<Vec<_>, _>>()?;
            let ty = Type::arrows(args.clone(), self_ty.clone());
            let info = ConstInfo::Constructor {
                datatype: datatypes.len(),
                ty,
            };
            if consts.insert(cname.clone(), info).is_some() {
                return scope_err(*cpos, format_args!("duplicate constructor `{cname}`"));
            }
            out.push(Constructor {
                name: cname.clone(),
                args,
            });
        }
        datatypes.push(Datatype {
            name: name.clone(),
            params: params.clone(),
            ctors: out,
            from_prelude: *from_prelude,
        });
    }

    // function signatures, so clause bodies may refer to any function
    let mut functions = Vec::new();
    let mut fun_items = Vec::new();
    for (item, from_prelude) in &tagged {
        let Item::Fun { name, sig, clauses, pos } = item else { continue };
        let scope = TypeScope {
            arities: &arities,
            params: None,
        };
        let signature = resolve_type(&scope, sig)?;
        let arity = signature.uncurry().0.len();
        if arity == 0 {
            return Err(FrontendError::Type(format!("{pos}: function `{name}` must take at least one argument")));
        }
        let info = ConstInfo::Function {
            index: functions.len(),
            ty: signature.clone(),
        };
        if consts.insert(name.clone(), info).is_some() {
            return scope_err(*pos, format_args!("`{name}` is already declared"));
        }
        functions.push(Function {
            name: name.clone(),
            signature,
            arity,
            clauses: Vec::new(),
            from_prelude: *from_prelude,
        });
        fun_items.push((functions.len() - 1, clauses));
    }

    let mut env = TheoryEnv {
        datatypes,
        functions,
        goals: Vec::new(),
        rules: RuleRegistry::default(),
        consts,
    };

    for (index, raw_clauses) in fun_items {
        let mut clauses = Vec::new();
        for (l, r) in raw_clauses {
            clauses.push(elaborate_clause(&env, index, l, r)?);
        }
        env.functions[index].clauses = clauses;
    }
    check_no_mutual_recursion(&env)?;

    // rules
    let mut registry = RuleRegistry::default();
    let mut derived = Vec::new();
    for d in &env.datatypes {
        derived.push(structural_rule(&env, &d.name).expect("declared datatype"));
    }
    for f in &env.functions {
        derived.push(computation_rule(&env, &f.name).expect("declared function"));
    }
    for r in derived {
        if let Err(r) = registry.insert(r) {
            return Err(FrontendError::Scope(format!("duplicate rule name `{}`", r.name)));
        }
    }
    for (item, from_prelude) in &tagged {
        let Item::Rule { name, target, cases, pos } = item else { continue };
        if !from_prelude {
            return scope_err(*pos, "rule declarations are only allowed in the prelude");
        }
        let rule = elaborate_rule(&env, name, target, cases, *pos)?;
        if registry.insert(rule).is_err() {
            return scope_err(*pos, format_args!("duplicate rule name `{name}`"));
        }
    }
    env.rules = registry;

    // goals
    for (item, _) in &tagged {
        let Item::Goal { name, prop, expect, pos } = item else { continue };
        if env.goal(name).is_some() {
            return scope_err(*pos, format_args!("duplicate goal `{name}`"));
        }
        if raw_has_forall(prop) {
            return scope_err(*pos, format_args!("goal `{name}`: quantifiers are not allowed in goals"));
        }
        let prop = resolve_prop(&env.consts, prop)?;
        Typing::new(&env)
            .check_prop(&prop)
            .map_err(|e| FrontendError::Type(format!("{pos}: goal `{name}`: {e}")))?;
        let expected = match expect {
            Some(text) => Some(parse_candidate(text, &env, &prop).map_err(|e| e.context(&format!("{pos}: expect of goal `{name}`")))?),
            None => None,
        };
        env.goals.push(Goal {
            name: name.clone(),
            prop,
            expect: expect.clone(),
            expected,
        });
    }
    Ok(env)
}

fn elaborate_clause(env: &TheoryEnv, index: usize, l: &RawTerm, r: &RawTerm) -> Result<Clause, FrontendError> {
    let f = &env.functions[index];
    let lhs = env.resolve_term(l)?;
    let rhs = env.resolve_term(r)?;
    let lpos = l.pos();
    match &lhs {
        Term::App(h, args) if matches!(&**h, Term::Const(c) if *c == f.name) => {
            if args.len() != f.arity {
                return Err(FrontendError::Type(format!(
                    "{lpos}: clause of `{}` has {} argument(s), signature has {}",
                    f.name,
                    args.len(),
                    f.arity
                )));
            }
            for a in args {
                check_pattern(env, a, lpos)?;
            }
        }
        _ => return scope_err(lpos, format_args!("clause head must be `{}`", f.name)),
    }
    let mut seen = Vec::new();
    collect_all_vars(&lhs, &mut seen);
    let mut uniq = BTreeSet::new();
    for v in &seen {
        if !uniq.insert(v.clone()) {
            return scope_err(lpos, format_args!("variable `{v}` occurs twice in a pattern of `{}`", f.name));
        }
    }
    for v in rhs.vars() {
        if !uniq.contains(&v) {
            return scope_err(r.pos(), format_args!("unbound variable `{v}` on right-hand side of `{}`", f.name));
        }
    }
    // type check against the signature, whose type variables stay rigid
    let mut typing = Typing::new(env);
    let (arg_tys, res_ty) = f.signature.uncurry();
    let type_err = |e: crate::kernel::KernelError| FrontendError::Type(format!("{lpos}: clause of `{}`: {e}", f.name));
    for (a, ty) in lhs.args().iter().zip(arg_tys) {
        let at = typing.infer_term(a).map_err(type_err)?;
        typing.unifier.unify(&at, ty).map_err(type_err)?;
    }
    let rt = typing.infer_term(&rhs).map_err(type_err)?;
    typing.unifier.unify(&rt, res_ty).map_err(type_err)?;
    Ok(Clause { lhs, rhs })
}

fn collect_all_vars(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Var(v) => out.push(v.clone()),
        Term::Const(_) => {}
        Term::App(h, args) => {
            collect_all_vars(h, out);
            for a in args {
                collect_all_vars(a, out);
            }
        }
    }
}

fn check_pattern(env: &TheoryEnv, t: &Term, pos: Pos) -> Result<(), FrontendError> {
    match t {
        Term::Var(_) => Ok(()),
        Term::Const(c) if env.is_constructor(c) => Ok(()),
        Term::App(h, args) => match &**h {
            Term::Const(c) if env.is_constructor(c) => args.iter().try_for_each(|a| check_pattern(env, a, pos)),
            other => scope_err(pos, format_args!("pattern contains non-constructor `{other}`")),
        },
        other => scope_err(pos, format_args!("pattern contains non-constructor `{other}`")),
    }
}

fn calls(t: &Term, env: &TheoryEnv, out: &mut BTreeSet<String>) {
    match t {
        Term::Const(c) if env.is_function(c) => {
            out.insert(c.clone());
        }
        Term::App(h, args) => {
            calls(h, env, out);
            for a in args {
                calls(a, env, out);
            }
        }
        _ => {}
    }
}

fn check_no_mutual_recursion(env: &TheoryEnv) -> Result<(), FrontendError> {
    let mut graph = DiGraph::<&str, ()>::new();
    let nodes: Vec<_> = env.functions.iter().map(|f| graph.add_node(f.name.as_str())).collect();
    for (i, f) in env.functions.iter().enumerate() {
        let mut callees = BTreeSet::new();
        for c in &f.clauses {
            calls(&c.rhs, env, &mut callees);
        }
        for callee in callees {
            if let Some(j) = env.functions.iter().position(|g| g.name == callee) {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    for scc in tarjan_scc(&graph) {
        if scc.len() > 1 {
            let mut names: Vec<&str> = scc.iter().map(|n| graph[*n]).collect();
            names.sort();
            return Err(FrontendError::Scope(format!(
                "mutually recursive functions are not supported: {}",
                names.join(", ")
            )));
        }
    }
    Ok(())
}

fn elaborate_rule(
    env: &TheoryEnv,
    name: &str,
    target: &str,
    raw_cases: &[RawRuleCase],
    pos: Pos,
) -> Result<InductionRule, FrontendError> {
    let target = if env.datatype(target).is_some() {
        RuleTarget::Datatype(target.to_string())
    } else if env.is_function(target) {
        RuleTarget::Function(target.to_string())
    } else {
        return scope_err(pos, format_args!("rule `{name}` targets unknown `{target}`"));
    };
    let Some(first) = raw_cases.first() else {
        return scope_err(pos, format_args!("rule `{name}` has no cases"));
    };
    let arity = first.conclusion.len();
    let mut typing = Typing::new(env);
    let positions: Vec<Type> = (0..arity).map(|_| typing.unifier.fresh()).collect();
    let mut cases = Vec::new();
    for raw in raw_cases {
        let conclusion = raw.conclusion.iter().map(|t| env.resolve_term(t)).collect::<Result<Vec<_>, _>>()?;
        let hyps = raw
            .hyps
            .iter()
            .map(|h| h.iter().map(|t| env.resolve_term(t)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if conclusion.len() != arity || hyps.iter().any(|h| h.len() != arity) {
            return Err(FrontendError::Type(format!("{pos}: rule `{name}`: every tuple must have {arity} entries")));
        }
        let mut bindings = Vec::new();
        for t in &conclusion {
            t.vars_ordered(&mut bindings);
        }
        for h in &hyps {
            for t in h {
                for v in t.vars() {
                    if !bindings.contains(&v) {
                        return scope_err(pos, format_args!("rule `{name}`: hypothesis variable `{v}` is not bound by the case"));
                    }
                }
            }
        }
        // each case gets its own variable scope
        let mut case_typing = Typing::new(env);
        case_typing.unifier = typing.unifier.clone();
        let err = |e: crate::kernel::KernelError| FrontendError::Type(format!("{pos}: rule `{name}`: {e}"));
        for tuple in std::iter::once(&conclusion).chain(hyps.iter()) {
            for (t, ty) in tuple.iter().zip(&positions) {
                let tt = case_typing.infer_term(t).map_err(err)?;
                case_typing.unifier.unify(&tt, ty).map_err(err)?;
            }
        }
        typing.unifier = case_typing.unifier;
        cases.push(RuleCase {
            bindings,
            hyps,
            conclusion,
        });
    }
    if let RuleTarget::Datatype(d) = &target {
        let dt = env.datatype(d).expect("checked above");
        let expected = typing.unifier.instantiate(&dt.self_type());
        if arity != 1 || typing.unifier.unify(&positions[0], &expected).is_err() {
            return Err(FrontendError::Type(format!("{pos}: rule `{name}` must have one position of type `{d}`")));
        }
    }
    let resolved: Vec<Type> = positions.iter().map(|t| typing.resolve(t)).collect();
    Ok(InductionRule {
        name: name.to_string(),
        arity,
        position_types: canonical_type_vars(&resolved),
        cases,
        kind: RuleKind::Handcrafted { target },
    })
}

fn fmt_type_atomic(t: &Type) -> String {
    match t {
        Type::Con(_, args) if !args.is_empty() => format!("({t})"),
        Type::Arrow(..) => format!("({t})"),
        _ => t.to_string(),
    }
}

/// Prints the user part of the theory (prelude items are implied) in theory
/// file syntax.
impl fmt::Display for TheoryEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.datatypes.iter().filter(|d| !d.from_prelude) {
            write!(f, "datatype {}", d.name)?;
            for p in &d.params {
                write!(f, " {p}")?;
            }
            f.write_str(" =")?;
            for (i, c) in d.ctors.iter().enumerate() {
                f.write_str(if i == 0 { " " } else { " | " })?;
                f.write_str(&c.name)?;
                for a in &c.args {
                    write!(f, " {}", fmt_type_atomic(a))?;
                }
            }
            writeln!(f)?;
        }
        for fun in self.functions.iter().filter(|x| !x.from_prelude) {
            writeln!(f, "fun {} : {} where", fun.name, fun.signature)?;
            for (i, c) in fun.clauses.iter().enumerate() {
                writeln!(f, "  {} {} = {}", if i == 0 { " " } else { "|" }, c.lhs, c.rhs)?;
            }
        }
        for g in &self.goals {
            write!(f, "goal {} : {}", g.name, g.prop)?;
            if let Some(e) = &g.expect {
                write!(f, " expect {e:?}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
