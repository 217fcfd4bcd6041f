//! Heuristic files: reading and static checking.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::ast::{Arg, Assertion, Domain, Expr, Heuristic, HeuristicSet, Kind, Param, Phase, Predicate, QuantKind};
use super::sexp::{read_all, Sexp};
use super::HeuristicError;
use crate::frontend::Pos;

/// Names every expression can refer to without binding them.
pub const BUILTINS: &[&str] = &["rule_name", "arbitrary_terms", "induction_terms"];

fn parse_err<T>(pos: Pos, msg: impl Into<String>) -> Result<T, HeuristicError> {
    Err(HeuristicError::Parse { pos, message: msg.into() })
}

fn scope_err<T>(pos: Pos, msg: impl Into<String>) -> Result<T, HeuristicError> {
    Err(HeuristicError::Scope { pos, message: msg.into() })
}

fn symbol(s: &Sexp, what: &str) -> Result<String, HeuristicError> {
    match s {
        Sexp::Symbol(n, _) => Ok(n.clone()),
        other => parse_err(other.pos(), format!("expected {what}")),
    }
}

/// Expressions carry no positions, so the checker reports the position of
/// the enclosing top-level form.
struct Located<T> {
    value: T,
    pos: Pos,
}

/// Parses and checks a heuristic file.
pub fn load_heuristics(text: &str) -> Result<HeuristicSet, HeuristicError> {
    let forms = read_all(text)?;
    let mut heuristics: Vec<Located<Heuristic>> = Vec::new();
    let mut assertions: Vec<Located<Assertion>> = Vec::new();
    for form in &forms {
        top_level(form, false, &mut heuristics, &mut assertions)?;
    }

    let mut names = HashSet::new();
    let mut table = BTreeMap::new();
    for a in &assertions {
        if !names.insert(a.value.name.clone()) {
            return Err(HeuristicError::Duplicate(a.value.name.clone()));
        }
        table.insert(a.value.name.clone(), a.value.clone());
    }
    for h in &heuristics {
        if !names.insert(h.value.name.clone()) {
            return Err(HeuristicError::Duplicate(h.value.name.clone()));
        }
    }
    for a in &assertions {
        let mut scope: HashMap<String, Option<Kind>> = a.value.params.iter().map(|p| (p.clone(), None)).collect();
        check(&a.value.body, &mut scope, &table, true, a.pos)?;
    }
    for h in &heuristics {
        check(&h.value.expr, &mut HashMap::new(), &table, false, h.pos)?;
    }
    Ok(HeuristicSet {
        heuristics: heuristics.into_iter().map(|h| h.value).collect(),
        assertions: table,
    })
}

fn top_level(
    form: &Sexp,
    in_prelude: bool,
    heuristics: &mut Vec<Located<Heuristic>>,
    assertions: &mut Vec<Located<Assertion>>,
) -> Result<(), HeuristicError> {
    let Sexp::List(items, pos) = form else {
        return parse_err(form.pos(), "expected `(heuristic ...)`, `(assertion ...)` or `(prelude ...)`");
    };
    let pos = *pos;
    match items.first().and_then(Sexp::as_symbol) {
        Some("prelude") if !in_prelude => {
            for f in &items[1..] {
                top_level(f, true, heuristics, assertions)?;
            }
            Ok(())
        }
        Some("heuristic") => {
            // (heuristic NAME (phase P) (weight W) EXPR)
            if items.len() != 5 {
                return parse_err(pos, "expected (heuristic NAME (phase P) (weight W) EXPR)");
            }
            let name = symbol(&items[1], "heuristic name")?;
            let phase = match field(&items[2], "phase")? {
                Sexp::Symbol(s, _) if s == "induction" => Phase::Induction,
                Sexp::Symbol(s, _) if s == "generalisation" => Phase::Generalisation,
                other => return parse_err(other.pos(), "phase must be `induction` or `generalisation`"),
            };
            let weight = match field(&items[3], "weight")? {
                Sexp::Int(0, p) => return parse_err(*p, "weight must not be zero"),
                Sexp::Int(w, _) => *w,
                other => return parse_err(other.pos(), "weight must be an integer"),
            };
            let expr = expr(&items[4])?;
            heuristics.push(Located {
                value: Heuristic {
                    name,
                    phase,
                    weight,
                    expr,
                    prelude: in_prelude,
                },
                pos,
            });
            Ok(())
        }
        Some("assertion") => {
            // (assertion NAME (PARAMS...) EXPR)
            if items.len() != 4 {
                return parse_err(pos, "expected (assertion NAME (PARAMS...) EXPR)");
            }
            let name = symbol(&items[1], "assertion name")?;
            let Sexp::List(ps, _) = &items[2] else {
                return parse_err(items[2].pos(), "expected a parameter list");
            };
            let params = ps.iter().map(|p| symbol(p, "parameter name")).collect::<Result<Vec<_>, _>>()?;
            let uniq: HashSet<_> = params.iter().collect();
            if uniq.len() != params.len() {
                return scope_err(pos, format!("assertion `{name}` repeats a parameter"));
            }
            let body = expr(&items[3])?;
            assertions.push(Located {
                value: Assertion { name, params, body },
                pos,
            });
            Ok(())
        }
        _ => parse_err(pos, "expected `(heuristic ...)`, `(assertion ...)` or `(prelude ...)`"),
    }
}

fn field<'a>(s: &'a Sexp, key: &str) -> Result<&'a Sexp, HeuristicError> {
    match s {
        Sexp::List(items, _) if items.len() == 2 && items[0].as_symbol() == Some(key) => Ok(&items[1]),
        other => parse_err(other.pos(), format!("expected ({key} ...)")),
    }
}

fn domain(s: &Sexp) -> Result<Domain, HeuristicError> {
    match s {
        Sexp::Symbol(d, _) if d == "terms" => Ok(Domain::Terms),
        Sexp::Symbol(d, _) if d == "occurrences" => Ok(Domain::Occurrences),
        Sexp::Symbol(d, _) if d == "numbers" => Ok(Domain::Numbers),
        Sexp::List(items, _) if items.len() == 2 => match (items[0].as_symbol(), items[1].as_symbol()) {
            (Some("occurrences-of"), Some(v)) => Ok(Domain::OccurrencesOf(v.to_string())),
            (Some("in"), Some("arbitrary_terms")) => Ok(Domain::ArbitraryTerms),
            (Some("in"), Some("induction_terms")) => Ok(Domain::InductionTerms),
            _ => parse_err(s.pos(), "unknown domain"),
        },
        other => parse_err(other.pos(), "expected a domain: terms, occurrences, numbers, (occurrences-of x), (in arbitrary_terms) or (in induction_terms)"),
    }
}

fn arg(s: &Sexp) -> Result<Arg, HeuristicError> {
    match s {
        Sexp::Symbol(v, _) => Ok(Arg::Var(v.clone())),
        Sexp::Int(n, _) => Ok(Arg::Num(*n)),
        Sexp::Str(t, _) => Ok(Arg::Str(t.clone())),
        Sexp::List(_, p) => parse_err(*p, "predicate arguments must be names or literals"),
    }
}

pub(crate) fn expr(s: &Sexp) -> Result<Expr, HeuristicError> {
    let (items, pos) = match s {
        Sexp::Symbol(b, _) if b == "true" => return Ok(Expr::Bool(true)),
        Sexp::Symbol(b, _) if b == "false" => return Ok(Expr::Bool(false)),
        Sexp::List(items, pos) if !items.is_empty() => (items, *pos),
        other => return parse_err(other.pos(), "expected an expression"),
    };
    let Some(head) = items[0].as_symbol() else {
        return parse_err(pos, "expected an operator or predicate name");
    };
    let rest = &items[1..];
    let arity = |n: usize| {
        if rest.len() == n {
            Ok(())
        } else {
            parse_err(pos, format!("`{head}` takes {n} operand(s)"))
        }
    };
    match head {
        "not" => {
            arity(1)?;
            Ok(Expr::Not(Box::new(expr(&rest[0])?)))
        }
        "and" => Ok(Expr::And(rest.iter().map(expr).collect::<Result<_, _>>()?)),
        "or" => Ok(Expr::Or(rest.iter().map(expr).collect::<Result<_, _>>()?)),
        "implies" => {
            arity(2)?;
            Ok(Expr::Implies(Box::new(expr(&rest[0])?), Box::new(expr(&rest[1])?)))
        }
        "forall" | "exists" => {
            arity(3)?;
            let var = symbol(&rest[0], "a variable name")?;
            Ok(Expr::Quant {
                kind: if head == "forall" { QuantKind::Forall } else { QuantKind::Exists },
                var,
                domain: domain(&rest[1])?,
                body: Box::new(expr(&rest[2])?),
            })
        }
        "exists-def" => {
            if rest.len() < 2 {
                return parse_err(pos, "expected (exists-def TARGET ASSERTION ARGS...)");
            }
            Ok(Expr::DefQuant {
                target: symbol(&rest[0], "a variable name")?,
                callee: symbol(&rest[1], "an assertion name")?,
                args: rest[2..].iter().map(arg).collect::<Result<_, _>>()?,
            })
        }
        name => match Predicate::from_name(name) {
            Some(pred) => Ok(Expr::Atom {
                pred,
                args: rest.iter().map(arg).collect::<Result<_, _>>()?,
            }),
            None => scope_err(pos, format!("unknown predicate `{name}`")),
        },
    }
}

fn builtin_kind(name: &str) -> Option<Kind> {
    (name == "rule_name").then_some(Kind::Rule)
}

fn lookup(scope: &HashMap<String, Option<Kind>>, name: &str, pos: Pos) -> Result<Option<Kind>, HeuristicError> {
    if let Some(k) = scope.get(name) {
        return Ok(*k);
    }
    if let Some(k) = builtin_kind(name) {
        return Ok(Some(k));
    }
    scope_err(pos, format!("unbound name `{name}`"))
}

/// Checks scoping, predicate arities, argument kinds and definitional
/// quantifier targets.
pub(crate) fn check(
    e: &Expr,
    scope: &mut HashMap<String, Option<Kind>>,
    assertions: &BTreeMap<String, Assertion>,
    clause: bool,
    pos: Pos,
) -> Result<(), HeuristicError> {
    match e {
        Expr::Bool(_) => Ok(()),
        Expr::Not(a) => check(a, scope, assertions, clause, pos),
        Expr::And(es) | Expr::Or(es) => es.iter().try_for_each(|x| check(x, scope, assertions, clause, pos)),
        Expr::Implies(a, b) => {
            check(a, scope, assertions, clause, pos)?;
            check(b, scope, assertions, clause, pos)
        }
        Expr::Quant { var, domain, body, .. } => {
            if BUILTINS.contains(&var.as_str()) {
                return scope_err(pos, format!("`{var}` is a builtin name and cannot be bound"));
            }
            let kind = match domain {
                Domain::Terms | Domain::ArbitraryTerms | Domain::InductionTerms => Kind::Term,
                Domain::Occurrences => Kind::Occ,
                Domain::Numbers => Kind::Num,
                Domain::OccurrencesOf(t) => {
                    if let Some(k) = lookup(scope, t, pos)? {
                        if !Param::TermLike.accepts(k) {
                            return scope_err(pos, format!("`{t}` is a {k}, occurrences-of needs a term"));
                        }
                    }
                    Kind::Occ
                }
            };
            let saved = scope.insert(var.clone(), Some(kind));
            let r = check(body, scope, assertions, clause, pos);
            match saved {
                Some(k) => scope.insert(var.clone(), k),
                None => scope.remove(var),
            };
            r
        }
        Expr::Atom { pred, args } => {
            let params = pred.params();
            if params.len() != args.len() {
                return scope_err(pos, format!("`{}` takes {} argument(s), got {}", pred.name(), params.len(), args.len()));
            }
            if matches!(pred, Predicate::IsLeftHandSide | Predicate::IsRightHandSide) && !clause {
                return Err(HeuristicError::Context(format!(
                    "`{}` is only meaningful inside an assertion evaluated on a defining clause",
                    pred.name()
                )));
            }
            for (a, p) in args.iter().zip(params) {
                let k = match a {
                    Arg::Var(v) => lookup(scope, v, pos)?,
                    Arg::Num(n) if *n >= 0 => Some(Kind::Num),
                    Arg::Num(_) => return scope_err(pos, "negative number literal"),
                    Arg::Str(_) => Some(Kind::Str),
                };
                if let Some(k) = k {
                    if !p.accepts(k) {
                        return scope_err(pos, format!("`{}` got a {k} for argument `{a}`", pred.name()));
                    }
                }
            }
            Ok(())
        }
        Expr::DefQuant { target, callee, args } => {
            if let Some(k) = lookup(scope, target, pos)? {
                if !Param::TermLike.accepts(k) {
                    return scope_err(pos, format!("exists-def target `{target}` is a {k}, not a term"));
                }
            }
            let Some(a) = assertions.get(callee) else {
                return scope_err(pos, format!("unknown assertion `{callee}`"));
            };
            if a.params.len() != args.len() {
                return scope_err(pos, format!("assertion `{callee}` takes {} argument(s), got {}", a.params.len(), args.len()));
            }
            for x in args {
                if let Arg::Var(v) = x {
                    lookup(scope, v, pos)?;
                }
            }
            Ok(())
        }
    }
}
