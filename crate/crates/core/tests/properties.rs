//! Algebraic and semantic invariants, checked on generated inputs.

mod common;

use common::*;
use ddrs_core::catalog::RewriteSystem;
use ddrs_core::oracle::{canonical, eval, Representation};
use ddrs_core::rewrite::{is_normal_form, normalize, normalize_quick, successors, validate_step, NormalizeOutcome, Strategy as Strat};
use ddrs_core::symbol::Symbol;
use ddrs_core::syntax::parse;
use ddrs_core::term::{Substitution, Term, Var};
use ddrs_core::termination::{term_to_tree, WeightAssignment};
use ddrs_core::tree::{exhaustive_reaches, search_tree_reduction, LabeledTree, TreeSearch};
use ddrs_core::unify::{match_term, unify};
use num_bigint::BigInt;
use proptest::prelude::*;
use std::sync::OnceLock;

fn systems() -> &'static [RewriteSystem] {
    static ALL: OnceLock<Vec<RewriteSystem>> = OnceLock::new();
    ALL.get_or_init(all_systems)
}

fn system_and_ground_term(depth: u32) -> impl Strategy<Value = (usize, Term)> {
    (0..systems().len()).prop_flat_map(move |k| (Just(k), ground_term_of(&systems()[k], depth)))
}

fn is_integer_system(sys: &RewriteSystem) -> bool {
    sys.signature().contains(Symbol::Neg)
}

/// Instances of `t` for every assignment of its variables to a few small ground terms.
fn ground_instances(vars: &[Var]) -> Vec<Substitution> {
    let pool = [parse("0").unwrap(), parse("1").unwrap(), parse("S(0)").unwrap()];
    let mut out = vec![Substitution::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                pool.iter().map(move |g| {
                    let mut s = s.clone();
                    s.bind(v.clone(), g.clone());
                    s
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn format_then_parse_is_identity(t in any_term(5)) {
        prop_assert_eq!(parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn matching_is_sound(p in any_term(3), a in any_term(2), b in any_term(2)) {
        let sigma = Substitution::from_pairs([(Var::new("x"), a), (Var::new("y"), b)]);
        let s = sigma.apply(&p);
        let found = match_term(&p, &s);
        prop_assert!(found.is_some());
        prop_assert_eq!(found.unwrap().apply(&p), s);
    }

    #[test]
    fn unifiers_unify_and_are_idempotent(s in any_term(3), t in any_term(3)) {
        if let Some(m) = unify(&s, &t) {
            prop_assert_eq!(m.apply(&s), m.apply(&t));
            prop_assert!(m.is_idempotent());
        }
    }

    /// Any ground unifier built from a small pool factors through the computed mgu.
    #[test]
    fn mgu_is_most_general(s in term_over(vec![Symbol::Digit(0), Symbol::Succ, Symbol::Plus], &["x", "y"], 3),
                           t in term_over(vec![Symbol::Digit(0), Symbol::Succ, Symbol::Plus], &["x", "y"], 3)) {
        let mut vars = s.vars();
        vars.extend(t.vars());
        vars.sort();
        vars.dedup();
        let mgu = unify(&s, &t);
        for theta in ground_instances(&vars) {
            if theta.apply(&s) == theta.apply(&t) {
                let m = mgu.as_ref().expect("a unifier exists, so unify must succeed");
                for v in &vars {
                    prop_assert_eq!(theta.apply(&m.apply(&Term::Var(v.clone()))), theta.apply(&Term::Var(v.clone())));
                }
            }
        }
    }

    #[test]
    fn positions_address_subterms(t in any_term(4), u in any_term(2)) {
        for p in t.positions(false) {
            let sub = t.subterm_at(&p).unwrap().clone();
            prop_assert_eq!(t.replace_at(&p, sub.clone()).unwrap(), t.clone());
            let r = t.replace_at(&p, u.clone()).unwrap();
            prop_assert_eq!(r.subterm_at(&p).unwrap(), &u);
            prop_assert_eq!(r.size() + sub.size(), t.size() + u.size());
        }
    }

    #[test]
    fn canonical_is_a_right_inverse_of_eval(v in -1_000_000i64..1_000_000) {
        for rep in [Representation::BinaryAppend, Representation::DecimalAppend, Representation::BinaryTree, Representation::DecimalTree, Representation::RingUnary] {
            if rep == Representation::RingUnary && v.abs() > 2_000 {
                continue;
            }
            let v = BigInt::from(v);
            prop_assert_eq!(eval(&canonical(&v, rep)).unwrap(), v);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn steps_are_sound_and_preserve_value((k, t) in system_and_ground_term(4)) {
        let sys = &systems()[k];
        prop_assume!(t.size() <= 12);
        let v = eval(&t).unwrap();
        for step in successors(sys, &t) {
            prop_assert!(validate_step(sys, &step), "{} {}", sys.label(), step.rule);
            prop_assert_eq!(eval(&step.after).unwrap(), v.clone(), "{} rule {} on {}", sys.label(), step.rule, t);
        }
    }

    #[test]
    fn normalization_is_deterministic((k, t) in system_and_ground_term(4), seed in 0u64..1000) {
        let sys = &systems()[k];
        for strat in [Strat::LeftmostInnermost, Strat::LeftmostOutermost, Strat::RandomSeeded(seed)] {
            prop_assert_eq!(normalize(sys, &t, strat, 2_000), normalize(sys, &t, strat, 2_000));
        }
    }

    #[test]
    fn quick_normalization_agrees_with_traced((k, t) in system_and_ground_term(4), seed in 0u64..1000) {
        let sys = &systems()[k];
        for strat in [Strat::LeftmostInnermost, Strat::LeftmostOutermost, Strat::RandomSeeded(seed)] {
            let full = normalize(sys, &t, strat, 2_000);
            let quick = normalize_quick(sys, &t, strat, 2_000);
            prop_assert_eq!(quick.kind(), full.kind());
            if let NormalizeOutcome::NormalForm { term, .. } = &full {
                prop_assert_eq!(quick.term(), term);
            }
        }
    }

    #[test]
    fn tree_translation_is_commutative(a in any_term(3), b in any_term(3)) {
        let w = WeightAssignment::extended();
        let l = term_to_tree(&Term::plus(a.clone(), b.clone()), &w).unwrap();
        let r = term_to_tree(&Term::plus(b, a), &w).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn tree_equality_ignores_child_order(l in 0u32..6, a in small_tree(2), b in small_tree(2)) {
        prop_assert_eq!(LabeledTree::node(l, vec![a.clone(), b.clone()]), LabeledTree::node(l, vec![b, a]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The goal-directed decision agrees with exhaustive search on tiny trees: whatever the
    /// explorer reaches is derivable, and short derivations stay inside the explored space.
    #[test]
    fn tree_decision_matches_exhaustive_search(a in small_tree(2), b in small_tree(2)) {
        prop_assume!(a.size() <= 4 && b.size() <= 4);
        let bound = 5;
        let explored = exhaustive_reaches(&a, &b, bound, 2);
        match search_tree_reduction(&a, &b, 10_000) {
            TreeSearch::Derivable(d) => {
                prop_assert!(d.proves(&a, &b));
                let biggest = d.steps.iter().map(|s| s.tree.size()).max().unwrap_or(a.size());
                let copies_ok = d.steps.iter().all(|s| !matches!(s.action, ddrs_core::tree::TreeMove::Lift { copies, .. } if copies > 2));
                if biggest.max(a.size()) <= bound && copies_ok {
                    prop_assert!(explored, "derivation {} stays within the bound but the explorer missed it", d);
                }
            }
            TreeSearch::NotDerivable => prop_assert!(!explored, "explorer reaches {} from {}", b, a),
            TreeSearch::BudgetExhausted => {}
        }
    }
}

#[test]
fn canonical_forms_are_normal_forms() {
    for sys in systems() {
        let rep = Representation::for_system(sys);
        let range = if is_integer_system(sys) { -200..=200 } else { 0..=200 };
        for v in range {
            let c = canonical(&BigInt::from(v), rep);
            assert!(is_normal_form(sys, &c), "{}: canonical form {c} of {v} is reducible", sys.label());
        }
    }
}
