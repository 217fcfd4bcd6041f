use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

/// A first-order applicative term.
///
/// Applications are kept spine-flattened: the head of an `App` is never
/// itself an `App`. Use [`Term::app`] to build applications so the invariant
/// holds.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Term {
    Var(String),
    Const(String),
    App(Box<Term>, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    /// Applies `head` to `args`, flattening nested spines. An empty argument
    /// list returns the head unchanged.
    pub fn app(head: Term, args: Vec<Term>) -> Term {
        if args.is_empty() {
            return head;
        }
        match head {
            Term::App(inner, mut prefix) => {
                prefix.extend(args);
                Term::App(inner, prefix)
            }
            head => Term::App(Box::new(head), args),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Head constant or variable name of the term (the term itself for leaves).
    pub fn head(&self) -> &Term {
        match self {
            Term::App(h, _) => h,
            t => t,
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            _ => &[],
        }
    }

    pub fn head_name(&self) -> Option<&str> {
        match self.head() {
            Term::Var(n) | Term::Const(n) => Some(n),
            Term::App(..) => None,
        }
    }

    /// Variables in left-to-right order of first occurrence.
    pub fn vars_ordered(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.iter().any(|o| o == v) {
                    out.push(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(h, args) => {
                h.vars_ordered(out);
                for a in args {
                    a.vars_ordered(out);
                }
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) => {}
            Term::App(h, args) => {
                h.collect_vars(out);
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// Whether `needle` occurs syntactically somewhere inside `self` (reflexive).
    pub fn contains(&self, needle: &Term) -> bool {
        if self == needle {
            return true;
        }
        match self {
            Term::App(h, args) => h.contains(needle) || args.iter().any(|a| a.contains(needle)),
            _ => false,
        }
    }

    /// Renames constants and variables through `f`; structure is untouched.
    pub fn map_names(&self, f: &impl Fn(&str, bool) -> String) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(v, false)),
            Term::Const(c) => Term::Const(f(c, true)),
            Term::App(h, args) => Term::App(
                Box::new(h.map_names(f)),
                args.iter().map(|a| a.map_names(f)).collect(),
            ),
        }
    }

    /// Number of application nodes in the term.
    pub fn app_count(&self) -> usize {
        match self {
            Term::App(h, args) => 1 + h.app_count() + args.iter().map(Term::app_count).sum::<usize>(),
            _ => 0,
        }
    }

    fn fmt_atomic(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::App(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n) | Term::Const(n) => f.write_str(n),
            Term::App(h, args) => {
                h.fmt_atomic(f)?;
                for a in args {
                    f.write_str(" ")?;
                    a.fmt_atomic(f)?;
                }
                Ok(())
            }
        }
    }
}

/// Goal propositions. `Forall` only ever appears in generated subgoals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Prop {
    Eq(Term, Term),
    Imp(Box<Prop>, Box<Prop>),
    Forall(String, Box<Prop>),
}

impl Prop {
    pub fn eq(lhs: Term, rhs: Term) -> Prop {
        Prop::Eq(lhs, rhs)
    }

    pub fn imp(antecedent: Prop, consequent: Prop) -> Prop {
        Prop::Imp(Box::new(antecedent), Box::new(consequent))
    }

    pub fn forall(var: impl Into<String>, body: Prop) -> Prop {
        Prop::Forall(var.into(), Box::new(body))
    }

    /// Free variables: every variable not bound by an enclosing `Forall`.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Prop::Eq(l, r) => {
                for v in l.vars().into_iter().chain(r.vars()) {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Prop::Imp(a, c) => {
                a.collect_free(bound, out);
                c.collect_free(bound, out);
            }
            Prop::Forall(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Free variables in left-to-right order of first occurrence.
    pub fn free_vars_ordered(&self) -> Vec<String> {
        let mut all = Vec::new();
        self.walk_terms(&mut |t| t.vars_ordered(&mut all));
        let free = self.free_vars();
        all.retain(|v| free.contains(v));
        all
    }

    /// All variable names, bound or free.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_terms(&mut |t| out.extend(t.vars()));
        let mut binders = Vec::new();
        self.binders(&mut binders);
        out.extend(binders);
        out
    }

    fn binders(&self, out: &mut Vec<String>) {
        match self {
            Prop::Eq(..) => {}
            Prop::Imp(a, c) => {
                a.binders(out);
                c.binders(out);
            }
            Prop::Forall(x, b) => {
                out.push(x.clone());
                b.binders(out);
            }
        }
    }

    /// Visits the maximal terms (equation sides) left to right.
    pub fn walk_terms<'a>(&'a self, f: &mut impl FnMut(&'a Term)) {
        match self {
            Prop::Eq(l, r) => {
                f(l);
                f(r);
            }
            Prop::Imp(a, c) => {
                a.walk_terms(f);
                c.walk_terms(f);
            }
            Prop::Forall(_, b) => b.walk_terms(f),
        }
    }

    pub fn contains_forall(&self) -> bool {
        match self {
            Prop::Eq(..) => false,
            Prop::Imp(a, c) => a.contains_forall() || c.contains_forall(),
            Prop::Forall(..) => true,
        }
    }

    pub fn map_names(&self, f: &impl Fn(&str, bool) -> String) -> Prop {
        match self {
            Prop::Eq(l, r) => Prop::Eq(l.map_names(f), r.map_names(f)),
            Prop::Imp(a, c) => Prop::imp(a.map_names(f), c.map_names(f)),
            Prop::Forall(x, b) => Prop::forall(f(x, false), b.map_names(f)),
        }
    }

    /// Number of object-level application nodes.
    pub fn app_count(&self) -> usize {
        let mut n = 0;
        self.walk_terms(&mut |t| n += t.app_count());
        n
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prop::Eq(l, r) => write!(f, "{l} = {r}"),
            Prop::Imp(a, c) => {
                match **a {
                    Prop::Eq(..) => write!(f, "{a}")?,
                    _ => write!(f, "({a})")?,
                }
                write!(f, " --> {c}")
            }
            Prop::Forall(x, b) => write!(f, "forall {x}. {b}"),
        }
    }
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

    #[test]
    fn app_flattens_spines() {
        let inner = Term::app(c("f"), vec![v("x")]);
        let t = Term::app(inner, vec![v("y")]);
        assert_eq!(t, Term::App(Box::new(c("f")), vec![v("x"), v("y")]));
        assert_eq!(Term::app(c("f"), vec![]), c("f"));
    }

    #[test]
    fn display_parenthesises_arguments() {
        let t = Term::app(c("append"), vec![Term::app(c("rev1"), vec![v("xs")]), v("ys")]);
        assert_eq!(t.to_string(), "append (rev1 xs) ys");
        let step = Prop::imp(
            Prop::forall("ys", Prop::eq(v("a"), v("ys"))),
            Prop::eq(v("a"), v("b")),
        );
        assert_eq!(step.to_string(), "(forall ys. a = ys) --> a = b");
    }

    #[test]
    fn free_vars_skip_bound_names() {
        // (forall y. g y x = y) --> h x z = x
        let p = Prop::imp(
            Prop::forall("y", Prop::eq(Term::app(c("g"), vec![v("y"), v("x")]), v("y"))),
            Prop::eq(Term::app(c("h"), vec![v("x"), v("z")]), v("x")),
        );
        let fv: Vec<_> = p.free_vars().into_iter().collect();
        assert_eq!(fv, vec!["x", "z"]);
        let closed = Prop::forall("x", Prop::eq(Term::app(c("f"), vec![v("x")]), v("x")));
        assert!(closed.free_vars().is_empty());
    }
}
