use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::symbol::{Base, Symbol};

/// A variable name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Var {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A first-order term. Arity is checked by the constructors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Symbol, Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("position {0} does not address a subterm")]
    InvalidPosition(Position),
    #[error("symbol {symbol} expects {expected} arguments, got {got}")]
    Arity { symbol: Symbol, expected: usize, got: usize },
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn app(symbol: Symbol, args: Vec<Term>) -> Result<Term, TermError> {
        if args.len() != symbol.arity() {
            return Err(TermError::Arity { symbol, expected: symbol.arity(), got: args.len() });
        }
        Ok(Term::App(symbol, args))
    }

    /// Panics if `d > 9`.
    pub fn digit(d: u8) -> Term {
        Term::App(Symbol::digit(d).expect("digit in 0..9"), Vec::new())
    }

    pub fn succ(t: Term) -> Term {
        Term::App(Symbol::Succ, vec![t])
    }

    pub fn pred(t: Term) -> Term {
        Term::App(Symbol::Pred, vec![t])
    }

    pub fn neg(t: Term) -> Term {
        Term::App(Symbol::Neg, vec![t])
    }

    pub fn plus(a: Term, b: Term) -> Term {
        Term::App(Symbol::Plus, vec![a, b])
    }

    pub fn times(a: Term, b: Term) -> Term {
        Term::App(Symbol::Times, vec![a, b])
    }

    /// Panics if the digit is not below the radix.
    pub fn append(base: Base, digit: u8, t: Term) -> Term {
        Term::App(Symbol::append(base, digit).expect("append digit below radix"), vec![t])
    }

    pub fn tree(base: Base, a: Term, b: Term) -> Term {
        Term::App(Symbol::Tree(base), vec![a, b])
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn head(&self) -> Option<Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(s, _) => Some(*s),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, a) => a,
        }
    }

    /// Number of symbol and variable occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Variables in order of first occurrence.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn contains_var(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    pub fn symbols(&self, out: &mut Vec<Symbol>) {
        if let Term::App(s, args) = self {
            out.push(*s);
            args.iter().for_each(|a| a.symbols(out));
        }
    }

    pub fn subterm_at(&self, pos: &Position) -> Result<&Term, TermError> {
        let mut cur = self;
        for &i in pos.path() {
            cur = match cur {
                Term::App(_, args) if i >= 1 && i <= args.len() => &args[i - 1],
                _ => return Err(TermError::InvalidPosition(pos.clone())),
            };
        }
        Ok(cur)
    }

    pub fn replace_at(&self, pos: &Position, replacement: Term) -> Result<Term, TermError> {
        self.subterm_at(pos)?;
        Ok(self.replace_path(pos.path(), replacement))
    }

    fn replace_path(&self, path: &[usize], replacement: Term) -> Term {
        match path.split_first() {
            None => replacement,
            Some((&i, rest)) => match self {
                Term::App(s, args) => {
                    let mut args = args.clone();
                    args[i - 1] = args[i - 1].replace_path(rest, replacement);
                    Term::App(*s, args)
                }
                Term::Var(_) => unreachable!("path validated"),
            },
        }
    }

    /// All positions in pre-order, which is lexicographic order on paths.
    pub fn positions(&self, non_var_only: bool) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_positions(non_var_only, &mut path, &mut out);
        out
    }

    fn collect_positions(&self, non_var_only: bool, path: &mut Vec<usize>, out: &mut Vec<Position>) {
        match self {
            Term::Var(_) => {
                if !non_var_only {
                    out.push(Position(path.clone()));
                }
            }
            Term::App(_, args) => {
                out.push(Position(path.clone()));
                for (i, a) in args.iter().enumerate() {
                    path.push(i + 1);
                    a.collect_positions(non_var_only, path, out);
                    path.pop();
                }
            }
        }
    }

    /// Renames every variable `v` to `v` followed by `suffix`.
    pub fn rename(&self, suffix: &str) -> Term {
        match self {
            Term::Var(v) => Term::Var(Var::new(&format!("{}{}", v.name(), suffix))),
            Term::App(s, args) => Term::App(*s, args.iter().map(|a| a.rename(suffix)).collect()),
        }
    }

    /// Renames variables to x, y, z, w, x1, ... in order of first occurrence.
    pub fn canonical_vars(&self) -> Term {
        canonical_renaming(&self.vars()).apply(self)
    }
}

/// Substitution sending `vars[k]` to the k-th standard variable name.
pub fn canonical_renaming(vars: &[Var]) -> Substitution {
    let mut s = Substitution::new();
    for (k, v) in vars.iter().enumerate() {
        s.bind(v.clone(), Term::var(&standard_var_name(k)));
    }
    s
}

pub fn standard_var_name(k: usize) -> String {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    if k < NAMES.len() {
        NAMES[k].to_string()
    } else {
        format!("x{}", k - NAMES.len() + 1)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Path of 1-based child indices; empty is the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn new(path: Vec<usize>) -> Position {
        Position(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn concat(&self, other: &Position) -> Position {
        let mut p = self.0.clone();
        p.extend_from_slice(&other.0);
        Position(p)
    }

    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Finite map from variables to terms.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Serialize for Substitution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_map(self.map.iter().map(|(v, t)| (v.name(), t.to_string())))
    }
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Substitution {
        Substitution { map: pairs.into_iter().collect() }
    }

    pub fn bind(&mut self, v: Var, t: Term) {
        self.map.insert(v, t);
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.map.get(v)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::App(s, args) => Term::App(*s, args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    /// `self.compose(other)` applied to t equals `other.apply(&self.apply(t))`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut map: BTreeMap<Var, Term> =
            self.map.iter().map(|(v, t)| (v.clone(), other.apply(t))).collect();
        for (v, t) in &other.map {
            map.entry(v.clone()).or_insert_with(|| t.clone());
        }
        map.retain(|v, t| !matches!(t, Term::Var(w) if w == v));
        Substitution { map }
    }

    pub fn is_idempotent(&self) -> bool {
        self.map.values().all(|t| self.map.keys().all(|v| !t.contains_var(v)))
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|(v, t)| format!("{v} -> {t}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn subterm_and_positions() {
        let p = t("P(-(-(x)))");
        assert_eq!(p.subterm_at(&Position::new(vec![1, 1])).unwrap(), &t("-(x)"));
        assert!(p.subterm_at(&Position::new(vec![2])).is_err());
        let q = t("x + 0");
        assert_eq!(q.positions(true), vec![Position::root(), Position::new(vec![2])]);
        assert_eq!(q.positions(false).len(), 3);
    }

    #[test]
    fn apply_and_compose() {
        let s = Substitution::from_pairs([(Var::new("x"), t("1"))]);
        assert_eq!(s.apply(&t("S(x)")), t("S(1)"));
        let a = Substitution::from_pairs([(Var::new("x"), t("S(y)"))]);
        let b = Substitution::from_pairs([(Var::new("y"), t("0"))]);
        let c = a.compose(&b);
        let term = t("x + y");
        assert_eq!(c.apply(&term), b.apply(&a.apply(&term)));
    }

    #[test]
    fn canonical_vars_renames_by_occurrence() {
        assert_eq!(t("b + (a + b)").canonical_vars(), t("x + (y + x)"));
    }

    #[test]
    fn arity_checked() {
        assert!(Term::app(Symbol::Plus, vec![Term::digit(0)]).is_err());
    }
}
