use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use super::{KernelError, Prop, Term};

/// Simple types. Arrows only appear in signatures.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Type {
    Var(String),
    Con(String, Vec<Type>),
    Arrow(Box<Type>, Box<Type>),
}

impl Type {
    pub fn con(name: impl Into<String>, args: Vec<Type>) -> Type {
        Type::Con(name.into(), args)
    }

    pub fn var(name: impl Into<String>) -> Type {
        Type::Var(name.into())
    }

    pub fn arrow(from: Type, to: Type) -> Type {
        Type::Arrow(Box::new(from), Box::new(to))
    }

    /// Builds `a1 -> a2 -> ... -> result`.
    pub fn arrows(args: Vec<Type>, result: Type) -> Type {
        args.into_iter().rev().fold(result, |acc, a| Type::arrow(a, acc))
    }

    /// Splits a right-nested arrow into argument types and the final result.
    pub fn uncurry(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut t = self;
        while let Type::Arrow(a, r) = t {
            args.push(&**a);
            t = r;
        }
        (args, t)
    }

    /// Datatype constructor names mentioned anywhere in the type, in order.
    pub fn datatype_names(&self, out: &mut Vec<String>) {
        match self {
            Type::Var(_) => {}
            Type::Con(n, args) => {
                if !out.contains(n) {
                    out.push(n.clone());
                }
                for a in args {
                    a.datatype_names(out);
                }
            }
            Type::Arrow(a, b) => {
                a.datatype_names(out);
                b.datatype_names(out);
            }
        }
    }

    fn occurs(&self, var: &str) -> bool {
        match self {
            Type::Var(v) => v == var,
            Type::Con(_, args) => args.iter().any(|a| a.occurs(var)),
            Type::Arrow(a, b) => a.occurs(var) || b.occurs(var),
        }
    }

    fn rename_vars(&self, f: &mut impl FnMut(&str) -> Type) -> Type {
        match self {
            Type::Var(v) => f(v),
            Type::Con(n, args) => Type::Con(n.clone(), args.iter().map(|a| a.rename_vars(f)).collect()),
            Type::Arrow(a, b) => Type::arrow(a.rename_vars(f), b.rename_vars(f)),
        }
    }

    fn fmt_atomic(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Con(_, args) if !args.is_empty() => write!(f, "({self})"),
            Type::Arrow(..) => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Var(v) => f.write_str(v),
            Type::Con(n, args) => {
                f.write_str(n)?;
                for a in args {
                    f.write_str(" ")?;
                    a.fmt_atomic(f)?;
                }
                Ok(())
            }
            Type::Arrow(a, b) => {
                match **a {
                    Type::Arrow(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                write!(f, " -> {b}")
            }
        }
    }
}

/// Lookup of constant signatures, implemented by the theory environment.
pub trait Signature {
    fn const_type(&self, name: &str) -> Option<&Type>;
}

impl Signature for HashMap<String, Type> {
    fn const_type(&self, name: &str) -> Option<&Type> {
        self.get(name)
    }
}

/// First-order unification over [`Type`].
///
/// Variables whose name starts with `?` are flexible; every other variable is
/// rigid and only unifies with itself or a flexible variable.
#[derive(Debug, Default, Clone)]
pub struct Unifier {
    subst: HashMap<String, Type>,
    next: usize,
}

impl Unifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh(&mut self) -> Type {
        let v = Type::Var(format!("?{}", self.next));
        self.next += 1;
        v
    }

    /// Replaces every variable of `t` with a fresh flexible one.
    pub fn instantiate(&mut self, t: &Type) -> Type {
        let mut map: HashMap<String, Type> = HashMap::new();
        t.rename_vars(&mut |v| map.entry(v.to_string()).or_insert_with(|| self.fresh_raw()).clone())
    }

    fn fresh_raw(&mut self) -> Type {
        let v = Type::Var(format!("?{}", self.next));
        self.next += 1;
        v
    }

    pub fn resolve(&self, t: &Type) -> Type {
        match t {
            Type::Var(v) => match self.subst.get(v) {
                Some(b) => self.resolve(b),
                None => t.clone(),
            },
            Type::Con(n, args) => Type::Con(n.clone(), args.iter().map(|a| self.resolve(a)).collect()),
            Type::Arrow(a, b) => Type::arrow(self.resolve(a), self.resolve(b)),
        }
    }

    pub fn unify(&mut self, a: &Type, b: &Type) -> Result<(), KernelError> {
        let a = self.resolve(a);
        let b = self.resolve(b);
        match (&a, &b) {
            (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
            (Type::Var(x), _) if x.starts_with('?') => self.bind(x, &b),
            (_, Type::Var(y)) if y.starts_with('?') => self.bind(y, &a),
            (Type::Con(n, xs), Type::Con(m, ys)) if n == m && xs.len() == ys.len() => {
                for (x, y) in xs.iter().zip(ys) {
                    self.unify(x, y)?;
                }
                Ok(())
            }
            (Type::Arrow(a1, r1), Type::Arrow(a2, r2)) => {
                self.unify(a1, a2)?;
                self.unify(r1, r2)
            }
            _ => Err(KernelError::TypeError(format!("cannot unify `{a}` with `{b}`"))),
        }
    }

    fn bind(&mut self, var: &str, t: &Type) -> Result<(), KernelError> {
        if t.occurs(var) {
            return Err(KernelError::TypeError(format!("infinite type: {var} occurs in `{t}`")));
        }
        self.subst.insert(var.to_string(), t.clone());
        Ok(())
    }
}

/// Type inference state for one proposition: a unifier plus the types of the
/// variables seen so far.
#[derive(Debug, Clone)]
pub struct Typing<'s, S: Signature + ?Sized> {
    sig: &'s S,
    pub unifier: Unifier,
    vars: HashMap<String, Type>,
}

impl<'s, S: Signature + ?Sized> Typing<'s, S> {
    pub fn new(sig: &'s S) -> Self {
        Typing {
            sig,
            unifier: Unifier::new(),
            vars: HashMap::new(),
        }
    }

    /// Seeds `name` with a fixed type.
    pub fn assume(&mut self, name: &str, ty: Type) {
        self.vars.insert(name.to_string(), ty);
    }

    pub fn var_type(&mut self, name: &str) -> Type {
        if let Some(t) = self.vars.get(name) {
            return t.clone();
        }
        let t = self.unifier.fresh();
        self.vars.insert(name.to_string(), t.clone());
        t
    }

    pub fn infer_term(&mut self, term: &Term) -> Result<Type, KernelError> {
        match term {
            Term::Var(v) => Ok(self.var_type(v)),
            Term::Const(c) => {
                let sig = self
                    .sig
                    .const_type(c)
                    .ok_or_else(|| KernelError::UnknownConstant(c.clone()))?;
                Ok(self.unifier.instantiate(sig))
            }
            Term::App(head, args) => {
                let mut ty = self.infer_term(head)?;
                for a in args {
                    let at = self.infer_term(a)?;
                    let result = self.unifier.fresh();
                    self.unifier
                        .unify(&ty, &Type::arrow(at, result.clone()))
                        .map_err(|e| match e {
                            KernelError::TypeError(m) => {
                                KernelError::TypeError(format!("in `{term}`: {m}"))
                            }
                            e => e,
                        })?;
                    ty = result;
                }
                Ok(ty)
            }
        }
    }

    pub fn check_prop(&mut self, prop: &Prop) -> Result<(), KernelError> {
        match prop {
            Prop::Eq(l, r) => {
                let lt = self.infer_term(l)?;
                let rt = self.infer_term(r)?;
                self.unifier
                    .unify(&lt, &rt)
                    .map_err(|e| KernelError::TypeError(format!("in `{prop}`: {e}")))
            }
            Prop::Imp(a, c) => {
                self.check_prop(a)?;
                self.check_prop(c)
            }
            Prop::Forall(x, body) => {
                let saved = self.vars.remove(x);
                let t = self.unifier.fresh();
                self.vars.insert(x.clone(), t);
                let res = self.check_prop(body);
                match saved {
                    Some(s) => {
                        self.vars.insert(x.clone(), s);
                    }
                    None => {
                        self.vars.remove(x);
                    }
                }
                res
            }
        }
    }

    pub fn resolve(&self, t: &Type) -> Type {
        self.unifier.resolve(t)
    }
}

/// Infers the most general types of the free variables of `goal`.
///
/// Remaining flexible type variables are renamed `a`, `b`, ... in order of
/// first appearance, walking the free variables in order of first
/// occurrence; the result is therefore stable under renaming of the goal's
/// variables.
pub fn infer_types<S: Signature + ?Sized>(sig: &S, goal: &Prop) -> Result<BTreeMap<String, Type>, KernelError> {
    let mut typing = Typing::new(sig);
    typing.check_prop(goal)?;
    let mut names: HashMap<String, Type> = HashMap::new();
    let mut out = BTreeMap::new();
    for v in goal.free_vars_ordered() {
        let raw = typing.var_type(&v);
        let resolved = typing.resolve(&raw);
        let pretty = resolved.rename_vars(&mut |tv| {
            if !tv.starts_with('?') {
                return Type::Var(tv.to_string());
            }
            let n = names.len();
            names
                .entry(tv.to_string())
                .or_insert_with(|| Type::Var(type_var_name(n)))
                .clone()
        });
        out.insert(v, pretty);
    }
    Ok(out)
}

fn type_var_name(n: usize) -> String {
    let letter = (b'a' + (n % 26) as u8) as char;
    if n < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", n / 26)
    }
}
