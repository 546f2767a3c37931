//! Generators shared by the integration tests.
#![allow(dead_code)]

use ddrs_core::catalog::{builtin_system, RewriteSystem, SystemId, Variant};
use ddrs_core::symbol::Symbol;
use ddrs_core::term::Term;
use ddrs_core::tree::LabeledTree;
use proptest::prelude::*;

/// Every built-in system in both variants, without duplicates for systems with one rule set.
pub fn all_systems() -> Vec<RewriteSystem> {
    let mut out = Vec::new();
    for id in SystemId::ALL {
        out.push(builtin_system(id, Variant::Edited).unwrap());
        if id.has_unedited() {
            out.push(builtin_system(id, Variant::Unedited).unwrap());
        }
    }
    out
}

pub fn edited_systems() -> Vec<RewriteSystem> {
    SystemId::ALL.iter().map(|&id| builtin_system(id, Variant::Edited).unwrap()).collect()
}

/// Terms over `symbols`, with leaves drawn from the constants among them and from `vars`.
pub fn term_over(symbols: Vec<Symbol>, vars: &'static [&'static str], depth: u32) -> BoxedStrategy<Term> {
    let constants: Vec<Symbol> = symbols.iter().copied().filter(|s| s.arity() == 0).collect();
    let operators: Vec<Symbol> = symbols.into_iter().filter(|s| s.arity() > 0).collect();
    let mut leaves: Vec<BoxedStrategy<Term>> = Vec::new();
    if !constants.is_empty() {
        leaves.push(prop::sample::select(constants).prop_map(|s| Term::app(s, vec![]).unwrap()).boxed());
    }
    if !vars.is_empty() {
        leaves.push(prop::sample::select(vars.to_vec()).prop_map(Term::var).boxed());
    }
    let leaf = prop::strategy::Union::new(leaves).boxed();
    if operators.is_empty() {
        return leaf;
    }
    leaf.prop_recursive(depth, 24, 2, move |inner| {
        (prop::sample::select(operators.clone()), inner.clone(), inner).prop_map(|(s, a, b)| {
            let args = if s.arity() == 1 { vec![a] } else { vec![a, b] };
            Term::app(s, args).unwrap()
        })
    })
    .boxed()
}

pub fn any_term(depth: u32) -> BoxedStrategy<Term> {
    term_over(Symbol::all(), &["x", "y", "z"], depth)
}

pub fn ground_term_of(sys: &RewriteSystem, depth: u32) -> BoxedStrategy<Term> {
    term_over(sys.signature().symbols().collect(), &[], depth)
}

/// Small unordered trees with labels below 6.
pub fn small_tree(depth: u32) -> BoxedStrategy<LabeledTree> {
    (0u32..6)
        .prop_map(LabeledTree::leaf)
        .prop_recursive(depth, 6, 2, |inner| {
            (0u32..6, prop::collection::vec(inner, 1..=2)).prop_map(|(l, cs)| LabeledTree::node(l, cs))
        })
        .boxed()
}
