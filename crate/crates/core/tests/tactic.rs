mod common;

use common::{cand, env_of, goal, rev_env};
use indrec_core::candidates::generate;
use indrec_core::frontend::{Candidate, TheoryEnv};
use indrec_core::kernel::{alpha_equal, Prop, Term, Type};
use indrec_core::rules::RuleKind;
use indrec_core::tactic::{apply_induct, check, prune, ApplyResult, Failure, PruneReason};
use proptest::prelude::*;

fn subgoals(env: &TheoryEnv, g: &Prop, text: &str) -> Vec<String> {
    match apply_induct(env, g, &cand(env, g, text)) {
        ApplyResult::Success(s) => s.iter().map(|p| p.to_string()).collect(),
        ApplyResult::Failure(f) => panic!("{text}: {f}"),
    }
}

#[test]
fn generalised_structural_induction_on_the_running_example() {
    let env = rev_env();
    let g = goal(&env, "rev2_rev1");
    let out = subgoals(&env, &g, "induct xs arbitrary: ys");
    assert_eq!(
        out,
        [
            "rev2 Nil ys = append (rev1 Nil) ys",
            "(forall ys. rev2 xs ys = append (rev1 xs) ys) --> rev2 (Cons a xs) ys = append (rev1 (Cons a xs)) ys",
        ]
    );
    // alpha-equivalence with the hand-written step
    let step = env
        .parse_prop("(forall zs. rev2 xs zs = append (rev1 xs) zs) --> rev2 (Cons a xs) ys = append (rev1 (Cons a xs)) ys")
        .unwrap();
    let ApplyResult::Success(s) = apply_induct(&env, &g, &cand(&env, &g, "induct xs arbitrary: ys")) else { panic!() };
    assert!(alpha_equal(&s[1], &step));
}

#[test]
fn plain_structural_induction_leaves_the_hypothesis_unquantified() {
    let env = rev_env();
    let g = goal(&env, "rev2_rev1");
    let out = subgoals(&env, &g, "induct xs");
    assert_eq!(out[1], "rev2 xs ys = append (rev1 xs) ys --> rev2 (Cons a xs) ys = append (rev1 (Cons a xs)) ys");
}

#[test]
fn computation_induction_mirrors_the_clauses() {
    let env = rev_env();
    let g = goal(&env, "rev2_rev1");
    let out = subgoals(&env, &g, "induct xs ys rule: rev2.induct");
    assert_eq!(
        out,
        [
            "rev2 Nil ys = append (rev1 Nil) ys",
            "rev2 xs (Cons x ys) = append (rev1 xs) (Cons x ys) --> rev2 (Cons x xs) ys = append (rev1 (Cons x xs)) ys",
        ]
    );
}

#[test]
fn case_variables_avoid_goal_variables() {
    let env = env_of("goal g : append (Cons x xs) ys = append a (Cons x ys)");
    let g = goal(&env, "g");
    let out = subgoals(&env, &g, "induct ys");
    // `a` and `x` are taken, so the constructor argument is renamed
    assert_eq!(out[1], "append (Cons x xs) ys = append a (Cons x ys) --> append (Cons x xs) (Cons a1 ys) = append a (Cons x (Cons a1 ys))");
}

#[test]
fn compound_terms_are_generalised_everywhere() {
    let env = rev_env();
    let g = goal(&env, "rev2_rev1");
    let out = subgoals(&env, &g, "induct (rev1 xs)");
    assert_eq!(out[0], "rev2 xs ys = append Nil ys");
    assert_eq!(out[1], "rev2 xs ys = append x ys --> rev2 xs ys = append (Cons a x) ys");
}

#[test]
fn repeated_variables_bind_later_occurrences() {
    let env = env_of("goal g : append xs xs = append xs xs");
    let g = goal(&env, "g");
    let out = subgoals(&env, &g, "induct xs xs rule: append.induct");
    // the second listing takes the second occurrence; the first listing takes
    // every other occurrence
    assert_eq!(out[0], "append Nil ys = append Nil Nil");
}

#[test]
fn trailing_terms_without_a_rule_become_arbitrary() {
    let env = rev_env();
    let g = goal(&env, "rev2_rev1");
    let a = subgoals(&env, &g, "induct xs ys");
    let b = subgoals(&env, &g, "induct xs arbitrary: ys");
    assert_eq!(a, b);
}

#[test]
fn failures_are_reported() {
    let env = rev_env();
    let g = goal(&env, "rev2_rev1");
    let c = cand(&env, &g, "induct xs rule: rev2.induct");
    assert_eq!(apply_induct(&env, &g, &c), ApplyResult::Failure(Failure::ArityMismatch));
    assert_eq!(check(&env, &g, &c), Err(PruneReason::Failed(Failure::ArityMismatch)));
    let env2 = env_of("fun idf : a -> a where idf x = x\ngoal g : idf y = y");
    let g2 = goal(&env2, "g");
    assert_eq!(apply_induct(&env2, &g2, &cand(&env2, &g2, "induct y")), ApplyResult::Failure(Failure::NoDatatype));
    let c = cand(&env, &g, "induct xs rule: nat_induct2");
    assert_eq!(apply_induct(&env, &g, &c), ApplyResult::Failure(Failure::IllTyped));
}

#[test]
fn inducting_on_an_absent_variable_makes_no_progress() {
    let env = env_of("datatype unit = Unit\nfun const : unit -> nat where const Unit = Zero\ngoal g : const u = Zero");
    let g = goal(&env, "g");
    let c = Candidate { induction_terms: vec![Term::var("v")], arbitrary: Default::default(), rule: Some("unit.induct".into()) };
    assert_eq!(check(&env, &g, &c), Err(PruneReason::NoProgress));
    // inducting on u itself does make progress
    assert!(check(&env, &g, &cand(&env, &g, "induct u")).is_ok());
}

#[test]
fn pruning_keeps_input_order_and_drops_failures() {
    let env = rev_env();
    let g = goal(&env, "rev2_rev1");
    let cs = generate(&env, &g);
    let kept = prune(&env, &g, &cs);
    let names: Vec<String> = kept.iter().map(|(c, _)| c.to_string()).collect();
    assert!(names.contains(&"induct xs".to_string()));
    assert!(names.contains(&"induct (rev1 xs)".to_string()));
    assert!(!names.contains(&"induct xs rule: rev2.induct".to_string()));
    let positions: Vec<usize> = kept.iter().map(|(c, _)| cs.iter().position(|d| d == c).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
    for (c, s) in &kept {
        assert!(s.iter().all(|p| !alpha_equal(p, &g)), "{c}");
    }
}

fn forall_binders(p: &Prop, out: &mut Vec<String>) {
    match p {
        Prop::Eq(..) => {}
        Prop::Imp(a, c) => {
            forall_binders(a, out);
            forall_binders(c, out);
        }
        Prop::Forall(x, b) => {
            out.push(x.clone());
            forall_binders(b, out);
        }
    }
}

fn antecedents(p: &Prop) -> usize {
    match p {
        Prop::Imp(_, c) => 1 + antecedents(c),
        _ => 0,
    }
}

const SHAPES: &str = "
fun size : tree a -> nat where
    size Leaf = Zero
  | size (Node l x r) = Suc (add (size l) (size r))
goal g1 : add (size t) (len xs) = add (len (flatten t)) (len (append xs ys))
goal g2 : replicate k z = replicate k z --> add m (add n k) = add (add m n) k
";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    // Structural cases follow the constructors, hypotheses follow the
    // recursive arguments, and binders are exactly the arbitrary variables.
    #[test]
    fn structural_induction_shape(goal_ix in 0usize..2, var_ix in 0usize..8, arb_mask in 0u32..64) {
        let env = env_of(SHAPES);
        let g = &env.goals[goal_ix].prop;
        let types = indrec_core::kernel::infer_types(&env, g).unwrap();
        let free: Vec<String> = g.free_vars().into_iter().filter(|v| matches!(types[v], Type::Con(..))).collect();
        let v = &free[var_ix % free.len()];
        let others: Vec<String> = g.free_vars().into_iter().filter(|x| x != v).collect();
        let arb = others.into_iter().enumerate().filter(|(i, _)| arb_mask & (1 << i) != 0).map(|(_, x)| x).collect();
        let c = Candidate::new(vec![Term::var(v.clone())], arb, None).unwrap();
        let Type::Con(d, _) = &types[v] else { unreachable!() };
        let dt = env.datatype(d).unwrap();
        let ApplyResult::Success(s) = apply_induct(&env, g, &c) else { panic!("{c}") };
        prop_assert_eq!(s.len(), dt.ctors.len());
        for (sg, ctor) in s.iter().zip(&dt.ctors) {
            let rec = ctor.args.iter().filter(|a| **a == dt.self_type()).count();
            prop_assert_eq!(antecedents(sg) - antecedents(g), rec);
            let mut binders = Vec::new();
            forall_binders(sg, &mut binders);
            prop_assert!(binders.iter().all(|b| c.arbitrary.contains(b)));
            if c.arbitrary.is_empty() {
                prop_assert!(!sg.contains_forall());
            } else {
                prop_assert_eq!(binders.len(), rec * c.arbitrary.len());
            }
        }
        prop_assert_eq!(apply_induct(&env, g, &c), apply_induct(&env, g, &c));
    }

    #[test]
    fn every_generated_candidate_applies_deterministically(ix in 0usize..2) {
        let env = env_of(SHAPES);
        let g = &env.goals[ix].prop;
        for c in generate(&env, g) {
            let a = apply_induct(&env, g, &c);
            prop_assert_eq!(&a, &apply_induct(&env, g, &c));
            if let (ApplyResult::Success(s), Some(r)) = (&a, &c.rule) {
                let rule = env.rule(r).unwrap();
                prop_assert_eq!(s.len(), rule.cases.len());
                if let RuleKind::Computation { .. } = rule.kind {
                    for (sg, case) in s.iter().zip(&rule.cases) {
                        prop_assert_eq!(antecedents(sg) - antecedents(g), case.hyps.len());
                    }
                }
            }
        }
    }
}
