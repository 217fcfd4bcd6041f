//! Occurrence paths into propositions and terms.
//!
//! Child indexing: for an application, index 0 is the head and index `i >= 1`
//! is the `i`-th argument. An equation has children 1 (lhs) and 2 (rhs), an
//! implication has 1 (antecedent) and 2 (consequent), and a quantifier has
//! 1 (its body). The empty path selects the root.

use std::fmt;

use serde::Serialize;

use super::{KernelError, Prop, Term};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OccPath(pub Vec<usize>);

impl OccPath {
    pub fn root() -> OccPath {
        OccPath(Vec::new())
    }

    pub fn child(&self, i: usize) -> OccPath {
        let mut v = self.0.clone();
        v.push(i);
        OccPath(v)
    }

    pub fn parent(&self) -> Option<OccPath> {
        let (_, init) = self.0.split_last()?;
        Some(OccPath(init.to_vec()))
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn is_prefix_of(&self, other: &OccPath) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for OccPath {
    fn from(v: Vec<usize>) -> Self {
        OccPath(v)
    }
}

impl fmt::Display for OccPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

/// A borrowed node of a syntax tree: either a proposition or a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Node<'a> {
    Prop(&'a Prop),
    Term(&'a Term),
}

impl<'a> From<&'a Prop> for Node<'a> {
    fn from(p: &'a Prop) -> Self {
        Node::Prop(p)
    }
}

impl<'a> From<&'a Term> for Node<'a> {
    fn from(t: &'a Term) -> Self {
        Node::Term(t)
    }
}

impl<'a> Node<'a> {
    pub fn as_term(self) -> Option<&'a Term> {
        match self {
            Node::Term(t) => Some(t),
            Node::Prop(_) => None,
        }
    }

    pub fn as_prop(self) -> Option<&'a Prop> {
        match self {
            Node::Prop(p) => Some(p),
            Node::Term(_) => None,
        }
    }

    /// Child at index `i`, following the indexing scheme described above.
    pub fn child(self, i: usize) -> Option<Node<'a>> {
        match self {
            Node::Prop(Prop::Eq(l, r)) => match i {
                1 => Some(Node::Term(l)),
                2 => Some(Node::Term(r)),
                _ => None,
            },
            Node::Prop(Prop::Imp(a, c)) => match i {
                1 => Some(Node::Prop(a)),
                2 => Some(Node::Prop(c)),
                _ => None,
            },
            Node::Prop(Prop::Forall(_, b)) => (i == 1).then_some(Node::Prop(b)),
            Node::Term(Term::App(h, args)) => {
                if i == 0 {
                    Some(Node::Term(h))
                } else {
                    args.get(i - 1).map(Node::Term)
                }
            }
            Node::Term(_) => None,
        }
    }

    /// Indices of all children, in left-to-right order.
    pub fn child_indices(self) -> std::ops::Range<usize> {
        match self {
            Node::Prop(Prop::Eq(..)) | Node::Prop(Prop::Imp(..)) => 1..3,
            Node::Prop(Prop::Forall(..)) => 1..2,
            Node::Term(Term::App(_, args)) => 0..args.len() + 1,
            Node::Term(_) => 0..0,
        }
    }

    /// Every `(path, node)` pair in pre-order, root first.
    pub fn all_nodes(self) -> Vec<(OccPath, Node<'a>)> {
        let mut out = Vec::new();
        self.collect(OccPath::root(), &mut out);
        out
    }

    fn collect(self, here: OccPath, out: &mut Vec<(OccPath, Node<'a>)>) {
        out.push((here.clone(), self));
        for i in self.child_indices() {
            if let Some(c) = self.child(i) {
                c.collect(here.child(i), out);
            }
        }
    }

    /// Syntactic node equality; a proposition never equals a term.
    pub fn same_as(self, other: Node<'_>) -> bool {
        match (self, other) {
            (Node::Term(a), Node::Term(b)) => a == b,
            (Node::Prop(a), Node::Prop(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Node<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Prop(p) => write!(f, "{p}"),
            Node::Term(t) => write!(f, "{t}"),
        }
    }
}

/// Resolves `path` against `tree`.
pub fn subterm_at<'a>(tree: impl Into<Node<'a>>, path: &OccPath) -> Result<Node<'a>, KernelError> {
    let mut node = tree.into();
    for (depth, &i) in path.0.iter().enumerate() {
        node = node.child(i).ok_or_else(|| KernelError::InvalidPath {
            path: path.clone(),
            depth,
        })?;
    }
    Ok(node)
}

/// Paths of every occurrence of `needle` in `tree`, in pre-order.
pub fn occurrences_of<'a>(tree: impl Into<Node<'a>>, needle: &Term) -> Vec<OccPath> {
    tree.into()
        .all_nodes()
        .into_iter()
        .filter(|(_, n)| matches!(n, Node::Term(t) if *t == needle))
        .map(|(p, _)| p)
        .collect()
}
