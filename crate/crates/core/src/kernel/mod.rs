//! Terms, propositions, occurrence paths, substitution and typing.

mod path;
mod term;
mod types;

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

pub use path::{occurrences_of, subterm_at, Node, OccPath};
pub use term::{Prop, Term};
pub use types::{infer_types, Signature, Type, Typing, Unifier};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("invalid path {path}: no child at depth {depth}")]
    InvalidPath { path: OccPath, depth: usize },
    #[error("type mismatch replacing `{key}`: expected {expected}, found {found}")]
    TypeMismatch { key: Term, expected: Type, found: Type },
    #[error("type error: {0}")]
    TypeError(String),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
}

/// A simultaneous replacement of terms by terms.
pub type Substitution = HashMap<Term, Term>;

/// Returns `base` if it is not in `avoid`, otherwise `base` followed by the
/// smallest numeric suffix that is.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded suffix search")
}

pub fn substitute_term(t: &Term, mapping: &Substitution) -> Term {
    if mapping.is_empty() {
        return t.clone();
    }
    if let Some(r) = mapping.get(t) {
        return r.clone();
    }
    match t {
        Term::App(h, args) => Term::app(
            substitute_term(h, mapping),
            args.iter().map(|a| substitute_term(a, mapping)).collect(),
        ),
        _ => t.clone(),
    }
}

/// Replaces every occurrence of each key simultaneously, renaming `Forall`
/// binders that would capture a variable of a replacement.
pub fn substitute(p: &Prop, mapping: &Substitution) -> Prop {
    if mapping.is_empty() {
        return p.clone();
    }
    match p {
        Prop::Eq(l, r) => Prop::Eq(substitute_term(l, mapping), substitute_term(r, mapping)),
        Prop::Imp(a, c) => Prop::imp(substitute(a, mapping), substitute(c, mapping)),
        Prop::Forall(x, body) => {
            // Keys mentioning the bound name refer to a different variable here.
            let inner: Substitution = mapping
                .iter()
                .filter(|(k, _)| !k.vars().contains(x))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let captures = inner.values().any(|v| v.vars().contains(x));
            if !captures {
                return Prop::forall(x.clone(), substitute(body, &inner));
            }
            let mut avoid = body.all_names();
            for (k, v) in &inner {
                avoid.extend(k.vars());
                avoid.extend(v.vars());
            }
            let fresh = fresh_name(x, &avoid);
            let rename: Substitution = [(Term::var(x.clone()), Term::var(fresh.clone()))].into_iter().collect();
            let renamed = substitute(body, &rename);
            Prop::forall(fresh, substitute(&renamed, &inner))
        }
    }
}

/// Like [`substitute`], but first checks that each replacement has a type
/// compatible with the term it replaces in `p`.
pub fn substitute_checked<S: Signature + ?Sized>(
    sig: &S,
    p: &Prop,
    mapping: &Substitution,
) -> Result<Prop, KernelError> {
    let mut typing = Typing::new(sig);
    typing.check_prop(p)?;
    let mut keys: Vec<_> = mapping.iter().collect();
    keys.sort();
    for (k, v) in keys {
        let kt = typing.infer_term(k)?;
        let vt = typing.infer_term(v)?;
        if typing.unifier.unify(&kt, &vt).is_err() {
            return Err(KernelError::TypeMismatch {
                key: k.clone(),
                expected: typing.resolve(&kt),
                found: typing.resolve(&vt),
            });
        }
    }
    Ok(substitute(p, mapping))
}

/// Equality modulo consistent renaming of `Forall`-bound variables.
pub fn alpha_equal(a: &Prop, b: &Prop) -> bool {
    alpha_prop(a, b, &mut Vec::new(), &mut Vec::new())
}

fn alpha_prop(a: &Prop, b: &Prop, ea: &mut Vec<String>, eb: &mut Vec<String>) -> bool {
    match (a, b) {
        (Prop::Eq(l1, r1), Prop::Eq(l2, r2)) => alpha_term(l1, l2, ea, eb) && alpha_term(r1, r2, ea, eb),
        (Prop::Imp(a1, c1), Prop::Imp(a2, c2)) => alpha_prop(a1, a2, ea, eb) && alpha_prop(c1, c2, ea, eb),
        (Prop::Forall(x, b1), Prop::Forall(y, b2)) => {
            ea.push(x.clone());
            eb.push(y.clone());
            let r = alpha_prop(b1, b2, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        _ => false,
    }
}

fn alpha_term(a: &Term, b: &Term, ea: &[String], eb: &[String]) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            match (ea.iter().rposition(|n| n == x), eb.iter().rposition(|n| n == y)) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::Const(x), Term::Const(y)) => x == y,
        (Term::App(h1, a1), Term::App(h2, a2)) => {
            a1.len() == a2.len()
                && alpha_term(h1, h2, ea, eb)
                && a1.iter().zip(a2).all(|(x, y)| alpha_term(x, y, ea, eb))
        }
        _ => false,
    }
}

/// Free variables of a goal.
pub fn free_vars(goal: &Prop) -> BTreeSet<String> {
    goal.free_vars()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn app(h: &str, args: Vec<Term>) -> Term {
        Term::app(c(h), args)
    }
    fn goal() -> Prop {
        Prop::eq(
            app("rev2", vec![v("xs"), v("ys")]),
            app("append", vec![app("rev1", vec![v("xs")]), v("ys")]),
        )
    }

    #[test]
    fn ground_substitution() {
        let m: Substitution = [(v("xs"), c("Nil"))].into_iter().collect();
        let out = substitute(&goal(), &m);
        assert_eq!(out.to_string(), "rev2 Nil ys = append (rev1 Nil) ys");
        assert_eq!(substitute(&goal(), &Substitution::new()), goal());
    }

    #[test]
    fn substitution_avoids_capture() {
        // forall ys. P xs ys, with xs := Cons ys Nil
        let p = Prop::forall("ys", Prop::eq(app("P", vec![v("xs"), v("ys")]), v("ys")));
        let m: Substitution = [(v("xs"), app("Cons", vec![v("ys"), c("Nil")]))].into_iter().collect();
        let out = substitute(&p, &m);
        let before: BTreeSet<String> = ["ys".to_string()].into_iter().collect();
        assert_eq!(out.free_vars(), before, "the substituted ys must stay free");
        match &out {
            Prop::Forall(x, _) => assert_ne!(x, "ys"),
            _ => panic!("binder lost"),
        }
        assert_eq!(out.to_string(), "forall ys1. P (Cons ys Nil) ys1 = ys1");
    }

    #[test]
    fn bound_occurrences_are_not_replaced() {
        let p = Prop::forall("x", Prop::eq(v("x"), v("y")));
        let m: Substitution = [(v("x"), c("Nil"))].into_iter().collect();
        assert_eq!(substitute(&p, &m), p);
    }

    #[test]
    fn compound_keys_replace_all_occurrences() {
        let m: Substitution = [(app("rev1", vec![v("xs")]), v("x"))].into_iter().collect();
        let p = Prop::eq(app("rev1", vec![v("xs")]), app("f", vec![app("rev1", vec![v("xs")]), v("xs")]));
        assert_eq!(substitute(&p, &m).to_string(), "x = f x xs");
    }

    #[test]
    fn alpha_equality() {
        let f = |x: &str| Prop::forall(x, Prop::eq(app("f", vec![v(x)]), v(x)));
        assert!(alpha_equal(&f("x"), &f("y")));
        let open = |x: &str| Prop::eq(app("f", vec![v(x)]), v(x));
        assert!(!alpha_equal(&open("x"), &open("y")));
        assert!(alpha_equal(&goal(), &goal()));
        // bound vs free must not match
        let a = Prop::forall("x", Prop::eq(v("x"), v("y")));
        let b = Prop::forall("y", Prop::eq(v("y"), v("y")));
        assert!(!alpha_equal(&a, &b));
    }

    #[test]
    fn fresh_names_use_smallest_suffix() {
        let avoid: BTreeSet<String> = ["x", "x1", "x3"].iter().map(|s| s.to_string()).collect();
        assert_eq!(fresh_name("x", &avoid), "x2");
        assert_eq!(fresh_name("y", &avoid), "y");
    }

    #[test]
    fn checked_substitution_rejects_mismatch() {
        let nat = Type::con("nat", vec![]);
        let list = Type::con("list", vec![Type::var("a")]);
        let mut sig: HashMap<String, Type> = HashMap::new();
        sig.insert("Zero".into(), nat.clone());
        sig.insert("Nil".into(), list.clone());
        sig.insert("len".into(), Type::arrow(list, nat));
        let p = Prop::eq(app("len", vec![v("xs")]), c("Zero"));
        let bad: Substitution = [(v("xs"), c("Zero"))].into_iter().collect();
        assert!(matches!(substitute_checked(&sig, &p, &bad), Err(KernelError::TypeMismatch { .. })));
        let good: Substitution = [(v("xs"), c("Nil"))].into_iter().collect();
        assert_eq!(substitute_checked(&sig, &p, &good).unwrap().to_string(), "len Nil = Zero");
    }
}
