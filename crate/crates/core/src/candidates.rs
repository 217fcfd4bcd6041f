//! Syntax-directed construction of induction candidates: every application
//! in the goal offers the order-preserving sublists of its arguments, alone
//! and paired with each rule applicable to its head.

use std::collections::HashSet;

use crate::frontend::{Candidate, TheoryEnv};
use crate::kernel::{Prop, Term};
use crate::rules::applicable_rules;

/// Default bound on the number of generated candidates.
pub const DEFAULT_CANDIDATE_CAP: usize = 1000;

/// Application nodes of `goal` in pre-order. Equality and implication are
/// logical structure, not applications.
pub fn application_nodes(goal: &Prop) -> Vec<&Term> {
    fn term<'a>(t: &'a Term, out: &mut Vec<&'a Term>) {
        if let Term::App(_, args) = t {
            out.push(t);
            for a in args {
                term(a, out);
            }
        }
    }
    fn prop<'a>(p: &'a Prop, out: &mut Vec<&'a Term>) {
        match p {
            Prop::Eq(l, r) => {
                term(l, out);
                term(r, out);
            }
            Prop::Imp(a, c) => {
                prop(a, out);
                prop(c, out);
            }
            Prop::Forall(_, b) => prop(b, out),
        }
    }
    let mut out = Vec::new();
    prop(goal, &mut out);
    out
}

/// Nonempty order-preserving index sublists of `0..n`, shortest first, then
/// in lexicographic index order.
pub fn sublists(n: usize) -> Vec<Vec<usize>> {
    fn extend(start: usize, n: usize, len: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            extend(i + 1, n, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for len in 1..=n {
        extend(0, n, len, &mut Vec::new(), &mut out);
    }
    out
}

/// Candidates for `goal` with empty arbitrary sets, duplicate-free, in
/// traversal order, bounded by [`DEFAULT_CANDIDATE_CAP`].
pub fn generate(env: &TheoryEnv, goal: &Prop) -> Vec<Candidate> {
    generate_capped(env, goal, DEFAULT_CANDIDATE_CAP)
}

pub fn generate_capped(env: &TheoryEnv, goal: &Prop, cap: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    'nodes: for node in application_nodes(goal) {
        let rules = node.head_name().map(|h| applicable_rules(env, h)).unwrap_or_default();
        let args = node.args();
        for sub in sublists(args.len()) {
            let terms: Vec<Term> = sub.iter().map(|&i| args[i].clone()).collect();
            let variants = std::iter::once(None).chain(rules.iter().cloned().map(Some));
            for rule in variants {
                let c = Candidate {
                    induction_terms: terms.clone(),
                    arbitrary: Default::default(),
                    rule,
                };
                if seen.insert(c.clone()) {
                    if out.len() == cap {
                        log::warn!("candidate generation stopped at the cap of {cap}");
                        break 'nodes;
                    }
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Number of candidates [`generate`] produces.
pub fn count_candidates(env: &TheoryEnv, goal: &Prop) -> usize {
    generate(env, goal).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sublists_keep_order() {
        assert_eq!(sublists(2), vec![vec![0], vec![1], vec![0, 1]]);
        assert_eq!(sublists(3).len(), 7);
        assert!(sublists(0).is_empty());
    }
}
