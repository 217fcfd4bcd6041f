//! Abstract syntax of heuristic expressions.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Induction,
    Generalisation,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Induction => "induction",
            Phase::Generalisation => "generalisation",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuantKind {
    Forall,
    Exists,
}

/// What a quantifier ranges over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Distinct subterms of the current tree.
    Terms,
    /// Every path of the current tree.
    Occurrences,
    /// Paths of the current tree at which the bound term occurs.
    OccurrencesOf(String),
    /// 1 to the largest declared arity.
    Numbers,
    /// Variables the candidate generalises, as terms.
    ArbitraryTerms,
    /// The candidate's induction terms, in order.
    InductionTerms,
}

/// Kind of a runtime value, used for static and dynamic checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Term,
    Occ,
    Num,
    Rule,
    Str,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Term => "term",
            Kind::Occ => "occurrence",
            Kind::Num => "number",
            Kind::Rule => "rule",
            Kind::Str => "string",
        })
    }
}

/// Expected kind of a predicate argument. `TermLike` accepts a term or an
/// occurrence, which stands for the subterm found there.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Param {
    TermLike,
    Occ,
    Num,
    Rule,
    Str,
}

impl Param {
    pub fn accepts(self, k: Kind) -> bool {
        matches!(
            (self, k),
            (Param::TermLike, Kind::Term | Kind::Occ)
                | (Param::Occ, Kind::Occ)
                | (Param::Num, Kind::Num)
                | (Param::Rule, Kind::Rule)
                | (Param::Str, Kind::Str)
        )
    }
}

macro_rules! predicates {
    ($($variant:ident => $name:literal [$($p:ident),*] $doc:literal;)*) => {
        /// Atomic predicates of the language.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum Predicate {
            $(#[doc = $doc] $variant,)*
        }

        impl Predicate {
            pub const ALL: &'static [Predicate] = &[$(Predicate::$variant,)*];

            pub fn name(self) -> &'static str {
                match self { $(Predicate::$variant => $name,)* }
            }

            pub fn params(self) -> &'static [Param] {
                match self { $(Predicate::$variant => &[$(Param::$p),*],)* }
            }

            pub fn doc(self) -> &'static str {
                match self { $(Predicate::$variant => $doc,)* }
            }

            pub fn from_name(name: &str) -> Option<Predicate> {
                match name { $($name => Some(Predicate::$variant),)* _ => None }
            }
        }
    };
}

predicates! {
    IsNthArgumentOf => "is_nth_argument_of" [Occ, Num, Occ]
        "The first occurrence is exactly the n-th argument of the application whose head is at the third.";
    IsOrBelowNthArgumentOf => "is_or_below_nth_argument_of" [Occ, Num, Occ]
        "The first occurrence lies in or below the n-th argument of the application whose head is at the third.";
    IsLeftHandSide => "is_left_hand_side" [Occ]
        "Clause contexts only: the occurrence lies in the clause's left-hand side.";
    IsRightHandSide => "is_right_hand_side" [Occ]
        "Clause contexts only: the occurrence lies in the clause's right-hand side.";
    AreOfSameTerm => "are_of_same_term" [TermLike, TermLike]
        "Both arguments denote syntactically equal subterms.";
    IsVariable => "is_variable" [TermLike] "The term is a variable.";
    IsConstant => "is_constant" [TermLike] "The term is a declared constant (function or constructor).";
    IsConstructor => "is_constructor" [TermLike] "The term is a constructor constant.";
    IsDefinedFunction => "is_defined_function" [TermLike] "The term is a function constant with defining clauses.";
    IsRecursiveFunction => "is_recursive_function" [TermLike] "The term is a function whose clauses call it.";
    IsCompound => "is_compound" [TermLike] "The term is an application.";
    OccursIn => "occurs_in" [TermLike, TermLike] "The first term is a subterm of the second (or equal to it).";
    HeadOf => "head_of" [TermLike, TermLike] "The second term is an application headed by the first.";
    IsInductionTerm => "is_induction_term" [TermLike] "The term is one of the candidate's induction terms.";
    IsNthInductionTerm => "is_nth_induction_term" [TermLike, Num] "The term is the candidate's n-th induction term.";
    IsInArbitrary => "is_in_arbitrary" [TermLike] "The term is a variable the candidate generalises.";
    IsNamed => "is_named" [TermLike, Str] "The term is a variable or constant with the given name.";
    PatternMatchesOn => "pattern_matches_on" [TermLike, Num] "Some clause of the function has a constructor pattern at argument n.";
    HasRule => "has_rule" [Rule] "The candidate names a rule.";
    RuleOfFunction => "rule_of_function" [Rule, TermLike] "The rule is the function's computation rule or a handcrafted rule registered for it.";
    IsStructuralRule => "is_structural_rule" [Rule] "The rule is a datatype's structural rule.";
    IsComputationRule => "is_computation_rule" [Rule] "The rule is derived from a function definition.";
    IsHandcraftedRule => "is_handcrafted_rule" [Rule] "The rule is a handcrafted prelude rule.";
    RuleIs => "rule_is" [Rule, Str] "The rule has the given name.";
    NumberIs => "number_is" [Num, Num] "The two numbers are equal.";
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    /// A bound name, an assertion parameter, or the builtin `rule_name`.
    Var(String),
    Num(i64),
    Str(String),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Var(v) => f.write_str(v),
            Arg::Num(n) => write!(f, "{n}"),
            Arg::Str(s) => write!(f, "{s:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Bool(bool),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Quant {
        kind: QuantKind,
        var: String,
        domain: Domain,
        body: Box<Expr>,
    },
    Atom {
        pred: Predicate,
        args: Vec<Arg>,
    },
    /// Holds iff `target` is bound to a defined function and the named
    /// assertion holds on at least one of its defining clauses.
    DefQuant {
        target: String,
        callee: String,
        args: Vec<Arg>,
    },
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Terms => f.write_str("terms"),
            Domain::Occurrences => f.write_str("occurrences"),
            Domain::OccurrencesOf(v) => write!(f, "(occurrences-of {v})"),
            Domain::Numbers => f.write_str("numbers"),
            Domain::ArbitraryTerms => f.write_str("(in arbitrary_terms)"),
            Domain::InductionTerms => f.write_str("(in induction_terms)"),
        }
    }
}

/// Prints the expression in file syntax.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Not(e) => write!(f, "(not {e})"),
            Expr::And(es) | Expr::Or(es) => {
                f.write_str(if matches!(self, Expr::And(_)) { "(and" } else { "(or" })?;
                for e in es {
                    write!(f, " {e}")?;
                }
                f.write_str(")")
            }
            Expr::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Expr::Quant { kind, var, domain, body } => {
                let k = if *kind == QuantKind::Forall { "forall" } else { "exists" };
                write!(f, "({k} {var} {domain} {body})")
            }
            Expr::Atom { pred, args } => {
                write!(f, "({}", pred.name())?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            Expr::DefQuant { target, callee, args } => {
                write!(f, "(exists-def {target} {callee}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A parameterised expression evaluated on defining clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assertion {
    pub name: String,
    pub params: Vec<String>,
    pub body: Expr,
}

/// A weighted expression evaluated on goals in one pipeline phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Heuristic {
    pub name: String,
    pub phase: Phase,
    pub weight: i64,
    pub expr: Expr,
    /// Declared in the `prelude` section: may name prelude constants.
    pub prelude: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HeuristicSet {
    pub heuristics: Vec<Heuristic>,
    pub assertions: BTreeMap<String, Assertion>,
}

impl HeuristicSet {
    pub fn get(&self, name: &str) -> Option<&Heuristic> {
        self.heuristics.iter().find(|h| h.name == name)
    }

    pub fn phase(&self, phase: Phase) -> impl Iterator<Item = &Heuristic> {
        self.heuristics.iter().filter(move |h| h.phase == phase)
    }
}
