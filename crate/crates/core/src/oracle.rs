//! Exact integer meaning of ground terms and the ground-completeness checker.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{RewriteSystem, SystemId, Variant};
use crate::rewrite::{normalize_quick, OutcomeKind, QuickOutcome, Strategy};
use crate::symbol::{Base, Signature, Style, Symbol};
use crate::term::Term;

pub type IntegerValue = BigInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("term `{0}` contains variables")]
    NonGround(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Representation {
    BinaryAppend,
    DecimalAppend,
    BinaryTree,
    DecimalTree,
    RingUnary,
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Representation::BinaryAppend => "binary-append",
            Representation::DecimalAppend => "decimal-append",
            Representation::BinaryTree => "binary-tree",
            Representation::DecimalTree => "decimal-tree",
            Representation::RingUnary => "ring-unary",
        })
    }
}

impl Representation {
    pub fn for_system(sys: &RewriteSystem) -> Representation {
        match sys.id {
            Some(SystemId::NBud | SystemId::ZBud) => Representation::BinaryAppend,
            Some(SystemId::NDub | SystemId::ZDub) => Representation::DecimalAppend,
            Some(SystemId::NBt | SystemId::ZBt) => Representation::BinaryTree,
            Some(SystemId::NDt | SystemId::ZDt) => Representation::DecimalTree,
            Some(SystemId::ZR) => Representation::RingUnary,
            None => Representation::infer(sys.signature()),
        }
    }

    pub fn infer(sig: &Signature) -> Representation {
        match (sig.style(), sig.base()) {
            (Some(Style::Append), Some(Base::Binary)) => Representation::BinaryAppend,
            (Some(Style::Append), _) => Representation::DecimalAppend,
            (Some(Style::Tree), Some(Base::Binary)) => Representation::BinaryTree,
            (Some(Style::Tree), _) => Representation::DecimalTree,
            (None, _) => Representation::RingUnary,
        }
    }
}

/// Integer denoted by a ground term. Appends and tree constructors shift by the base.
pub fn eval(t: &Term) -> Result<IntegerValue, EvalError> {
    match t {
        Term::Var(_) => Err(EvalError::NonGround(t.to_string())),
        Term::App(s, args) => {
            let a = |k: usize| eval(&args[k]);
            Ok(match s {
                Symbol::Digit(d) => BigInt::from(*d),
                Symbol::Succ => a(0)? + 1,
                Symbol::Pred => a(0)? - 1,
                Symbol::Neg => -a(0)?,
                Symbol::Plus => a(0)? + a(1)?,
                Symbol::Times => a(0)? * a(1)?,
                Symbol::Append(b, d) => a(0)? * b.radix() + *d,
                Symbol::Tree(b) => a(0)? * b.radix() + a(1)?,
            })
        }
    }
}

/// The intended normal form of `v`.
pub fn canonical(v: &IntegerValue, rep: Representation) -> Term {
    if v.is_zero() {
        return Term::digit(0);
    }
    if v.is_negative() {
        return Term::neg(canonical(&-v, rep));
    }
    let positional = |base: Base| {
        let mut digits = Vec::new();
        let mut n = v.clone();
        let radix = BigInt::from(base.radix());
        while !n.is_zero() {
            digits.push((&n % &radix).to_u8().expect("digit below radix"));
            n /= &radix;
        }
        digits.reverse();
        digits
    };
    match rep {
        Representation::BinaryAppend | Representation::DecimalAppend => {
            let base = if rep == Representation::BinaryAppend { Base::Binary } else { Base::Decimal };
            let ds = positional(base);
            ds[1..].iter().fold(Term::digit(ds[0]), |acc, &d| Term::append(base, d, acc))
        }
        Representation::BinaryTree | Representation::DecimalTree => {
            let base = if rep == Representation::BinaryTree { Base::Binary } else { Base::Decimal };
            let ds = positional(base);
            ds[1..].iter().fold(Term::digit(ds[0]), |acc, &d| Term::tree(base, acc, Term::digit(d)))
        }
        Representation::RingUnary => {
            let n = v.to_usize().expect("ring canonical forms are only built for small values");
            (1..n).fold(Term::digit(1), |acc, _| Term::plus(acc, Term::digit(1)))
        }
    }
}

fn ordered_symbols(sig: &Signature) -> Vec<Symbol> {
    let mut syms: Vec<Symbol> = sig.symbols().collect();
    syms.sort();
    syms
}

/// Ground terms of each size from 1 to `max_size - 1`, used to build the last level lazily.
fn lower_levels(syms: &[Symbol], max_size: usize) -> Vec<Vec<Term>> {
    let mut levels: Vec<Vec<Term>> = vec![Vec::new()];
    for n in 1..max_size {
        let level: Vec<Term> = level_iter(Arc::new(levels.clone()), Arc::new(syms.to_vec()), n).collect();
        levels.push(level);
    }
    levels
}

fn level_iter(levels: Arc<Vec<Vec<Term>>>, syms: Arc<Vec<Symbol>>, n: usize) -> Box<dyn Iterator<Item = Term> + Send> {
    let count = syms.len();
    Box::new((0..count).flat_map(move |k| {
        let s = syms[k];
        let levels = levels.clone();
        let it: Box<dyn Iterator<Item = Term> + Send> = match s.arity() {
            0 if n == 1 => Box::new(std::iter::once(Term::App(s, Vec::new()))),
            1 if n >= 2 => {
                let len = levels[n - 1].len();
                Box::new((0..len).map(move |i| Term::App(s, vec![levels[n - 1][i].clone()])))
            }
            2 if n >= 3 => Box::new((1..n - 1).flat_map(move |a| {
                let b = n - 1 - a;
                let levels = levels.clone();
                let (la, lb) = (levels[a].len(), levels[b].len());
                (0..la).flat_map(move |i| {
                    let levels = levels.clone();
                    (0..lb).map(move |j| Term::App(s, vec![levels[a][i].clone(), levels[b][j].clone()]))
                })
            })),
            _ => Box::new(std::iter::empty()),
        };
        it
    }))
}

/// Every ground term over `sig` with at most `max_size` symbols, by size, then head symbol,
/// then argument sizes and arguments.
pub fn enumerate_ground_terms(sig: &Signature, max_size: usize) -> impl Iterator<Item = Term> + Send {
    let syms = ordered_symbols(sig);
    let levels = lower_levels(&syms, max_size.max(1));
    let stored: Vec<Term> = levels.iter().flatten().cloned().collect();
    let last = level_iter(Arc::new(levels), Arc::new(syms), max_size);
    stored.into_iter().chain(last).filter(move |_| max_size >= 1)
}

/// Number of ground terms of each size `1..=max_size`.
pub fn count_ground_terms(sig: &Signature, max_size: usize) -> Vec<u128> {
    let syms = ordered_symbols(sig);
    let mut counts = vec![0u128; max_size + 1];
    for n in 1..=max_size {
        let mut c = 0u128;
        for s in &syms {
            c += match s.arity() {
                0 if n == 1 => 1,
                1 if n >= 2 => counts[n - 1],
                2 if n >= 3 => (1..n - 1).map(|a| counts[a] * counts[n - 1 - a]).sum(),
                _ => 0,
            };
        }
        counts[n] = c;
    }
    counts.remove(0);
    counts
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroundFailure {
    pub term: String,
    pub strategy: String,
    pub outcome: OutcomeKind,
    /// Normal form reached, if any.
    pub got: Option<String>,
    pub expected: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroundReport {
    pub system: String,
    pub variant: Variant,
    pub representation: Representation,
    pub size_bound: usize,
    pub strategies: Vec<String>,
    pub terms_checked: usize,
    pub failures: Vec<GroundFailure>,
}

impl GroundReport {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Default strategy set: innermost, outermost and three seeded random walks.
pub fn default_strategies() -> Vec<Strategy> {
    vec![
        Strategy::LeftmostInnermost,
        Strategy::LeftmostOutermost,
        Strategy::RandomSeeded(1),
        Strategy::RandomSeeded(2),
        Strategy::RandomSeeded(3),
    ]
}

/// Normalizes every ground term up to `max_size` under every strategy and compares the
/// result with the canonical form of its value. Work is spread over the current rayon pool.
pub fn check_ground(sys: &RewriteSystem, max_size: usize, strategies: &[Strategy], max_steps: usize) -> GroundReport {
    let rep = Representation::for_system(sys);
    let failures = Mutex::new(Vec::new());
    let checked = AtomicUsize::new(0);
    enumerate_ground_terms(sys.signature(), max_size).par_bridge().for_each(|t| {
        checked.fetch_add(1, Ordering::Relaxed);
        let expected = canonical(&eval(&t).expect("enumerated terms are ground"), rep);
        let mut local = Vec::new();
        for &strat in strategies {
            let out = normalize_quick(sys, &t, strat, max_steps);
            let ok = matches!(&out, QuickOutcome::NormalForm(nf, _) if *nf == expected);
            if !ok {
                local.push((
                    t.clone(),
                    GroundFailure {
                        term: t.to_string(),
                        strategy: strat.to_string(),
                        outcome: out.kind(),
                        got: match &out {
                            QuickOutcome::NormalForm(nf, _) => Some(nf.to_string()),
                            _ => None,
                        },
                        expected: expected.to_string(),
                    },
                ));
            }
        }
        if !local.is_empty() {
            failures.lock().expect("no poisoned lock").extend(local);
        }
    });
    let mut failures = failures.into_inner().expect("no poisoned lock");
    failures.sort_by(|(a, fa), (b, fb)| (a.size(), &fa.term, &fa.strategy).cmp(&(b.size(), &fb.term, &fb.strategy)));
    GroundReport {
        system: sys.name.clone(),
        variant: sys.variant,
        representation: rep,
        size_bound: max_size,
        strategies: strategies.iter().map(|s| s.to_string()).collect(),
        terms_checked: checked.into_inner(),
        failures: failures.into_iter().map(|(_, f)| f).collect(),
    }
}
