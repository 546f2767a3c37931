//! Syntactic matching and most general unifiers.

use std::collections::HashMap;

use crate::term::{Substitution, Term, Var};

/// Substitution σ with σ(pattern) = subject, if one exists.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut binds: Vec<(Var, Term)> = Vec::new();
    if match_into(pattern, subject, &mut binds) {
        Some(Substitution::from_pairs(binds))
    } else {
        None
    }
}

fn match_into(p: &Term, s: &Term, binds: &mut Vec<(Var, Term)>) -> bool {
    match p {
        Term::Var(v) => match binds.iter().find(|(w, _)| w == v) {
            Some((_, bound)) => bound == s,
            None => {
                binds.push((v.clone(), s.clone()));
                true
            }
        },
        Term::App(f, pargs) => match s {
            Term::App(g, sargs) if f == g => pargs.iter().zip(sargs).all(|(a, b)| match_into(a, b, binds)),
            _ => false,
        },
    }
}

/// Idempotent most general unifier with occurs check.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    let mut bindings: HashMap<Var, Term> = HashMap::new();
    let mut stack = vec![(s.clone(), t.clone())];
    while let Some((a, b)) = stack.pop() {
        let a = walk(&a, &bindings);
        let b = walk(&b, &bindings);
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if occurs(x, other, &bindings) {
                    return None;
                }
                bindings.insert(x.clone(), other.clone());
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g {
                    return None;
                }
                stack.extend(fa.iter().cloned().zip(ga.iter().cloned()));
            }
        }
    }
    let keys: Vec<Var> = bindings.keys().cloned().collect();
    Some(Substitution::from_pairs(keys.into_iter().map(|v| {
        let t = resolve(&Term::Var(v.clone()), &bindings);
        (v, t)
    })))
}

fn walk(t: &Term, b: &HashMap<Var, Term>) -> Term {
    let mut cur = t.clone();
    while let Term::Var(v) = &cur {
        match b.get(v) {
            Some(next) => cur = next.clone(),
            None => break,
        }
    }
    cur
}

fn occurs(x: &Var, t: &Term, b: &HashMap<Var, Term>) -> bool {
    match walk(t, b) {
        Term::Var(v) => &v == x,
        Term::App(_, args) => args.iter().any(|a| occurs(x, a, b)),
    }
}

fn resolve(t: &Term, b: &HashMap<Var, Term>) -> Term {
    match walk(t, b) {
        v @ Term::Var(_) => v,
        Term::App(f, args) => Term::App(f, args.iter().map(|a| resolve(a, b)).collect()),
    }
}

/// True if the two terms are equal up to a bijective renaming of variables.
pub fn is_variant(a: &Term, b: &Term) -> bool {
    a.canonical_vars() == b.canonical_vars()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn matching() {
        let m = match_term(&t("x + 0"), &t("1 + 0")).unwrap();
        assert_eq!(m.get(&Var::new("x")), Some(&t("1")));
        assert!(match_term(&t("x + 0"), &t("0 + 1")).is_none());
        let m = match_term(&t("S(x :b0)"), &t("S(1 :b0)")).unwrap();
        assert_eq!(m.get(&Var::new("x")), Some(&t("1")));
        assert!(match_term(&t("x + x"), &t("0 + 1")).is_none());
        assert!(match_term(&t("x + x"), &t("1 + 1")).is_some());
    }

    #[test]
    fn unification() {
        let u = unify(&t("P(x)"), &t("P(-(y))")).unwrap();
        assert_eq!(u.get(&Var::new("x")), Some(&t("-(y)")));
        let u = unify(&t("x + 0"), &t("0 + x'")).unwrap();
        assert_eq!(u.get(&Var::new("x")), Some(&t("0")));
        assert_eq!(u.get(&Var::new("x'")), Some(&t("0")));
        assert!(unify(&t("x"), &t("S(x)")).is_none());
        let u = unify(&t("x + y"), &t("y + S(z)")).unwrap();
        assert!(u.is_idempotent());
        assert_eq!(u.apply(&t("x + y")), u.apply(&t("y + S(z)")));
    }

    #[test]
    fn variants() {
        assert!(is_variant(&t("x + y"), &t("a + b")));
        assert!(!is_variant(&t("x + x"), &t("a + b")));
    }
}
