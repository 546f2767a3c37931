use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Radix of a positional constructor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Base {
    Binary,
    Decimal,
}

impl Base {
    pub fn radix(self) -> u8 {
        match self {
            Base::Binary => 2,
            Base::Decimal => 10,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Base::Binary => 'b',
            Base::Decimal => 'd',
        }
    }

    pub fn from_letter(c: char) -> Option<Base> {
        match c {
            'b' => Some(Base::Binary),
            'd' => Some(Base::Decimal),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    DigitConstant,
    Unary,
    Binary,
    Append,
    TreeConstructor,
}

/// A function symbol of the fixed signature.
///
/// The derived ordering (digits, S, P, neg, appends, plus, times, tree constructors)
/// is the enumeration order used for ground terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Digit(u8),
    Succ,
    Pred,
    Neg,
    Append(Base, u8),
    Plus,
    Times,
    Tree(Base),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymbolError {
    #[error("digit {0} out of range 0..9")]
    DigitOutOfRange(u8),
    #[error("append digit {digit} out of range for base {radix}")]
    AppendOutOfRange { digit: u8, radix: u8 },
    #[error("unknown symbol `{0}`")]
    Unknown(String),
}

/// Number of distinct symbols; `Symbol::index` maps into `0..SYMBOL_COUNT`.
pub const SYMBOL_COUNT: usize = 10 + 3 + 2 + 10 + 2 + 2;

impl Symbol {
    pub fn digit(v: u8) -> Result<Symbol, SymbolError> {
        if v <= 9 {
            Ok(Symbol::Digit(v))
        } else {
            Err(SymbolError::DigitOutOfRange(v))
        }
    }

    pub fn append(base: Base, digit: u8) -> Result<Symbol, SymbolError> {
        if digit < base.radix() {
            Ok(Symbol::Append(base, digit))
        } else {
            Err(SymbolError::AppendOutOfRange { digit, radix: base.radix() })
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Symbol::Digit(_) => 0,
            Symbol::Succ | Symbol::Pred | Symbol::Neg | Symbol::Append(..) => 1,
            Symbol::Plus | Symbol::Times | Symbol::Tree(_) => 2,
        }
    }

    pub fn kind(self) -> SymbolKind {
        match self {
            Symbol::Digit(_) => SymbolKind::DigitConstant,
            Symbol::Succ | Symbol::Pred | Symbol::Neg => SymbolKind::Unary,
            Symbol::Plus | Symbol::Times => SymbolKind::Binary,
            Symbol::Append(..) => SymbolKind::Append,
            Symbol::Tree(_) => SymbolKind::TreeConstructor,
        }
    }

    pub fn base(self) -> Option<Base> {
        match self {
            Symbol::Append(b, _) | Symbol::Tree(b) => Some(b),
            _ => None,
        }
    }

    /// Dense index for table lookups.
    pub fn index(self) -> usize {
        match self {
            Symbol::Digit(d) => d as usize,
            Symbol::Succ => 10,
            Symbol::Pred => 11,
            Symbol::Neg => 12,
            Symbol::Plus => 13,
            Symbol::Times => 14,
            Symbol::Append(Base::Binary, d) => 15 + d as usize,
            Symbol::Append(Base::Decimal, d) => 17 + d as usize,
            Symbol::Tree(Base::Binary) => 27,
            Symbol::Tree(Base::Decimal) => 28,
        }
    }

    /// Every symbol of the universe, in enumeration order.
    pub fn all() -> Vec<Symbol> {
        let mut v: Vec<Symbol> = (0..10).map(Symbol::Digit).collect();
        v.extend([Symbol::Succ, Symbol::Pred, Symbol::Neg]);
        v.extend((0..2).map(|d| Symbol::Append(Base::Binary, d)));
        v.extend((0..10).map(|d| Symbol::Append(Base::Decimal, d)));
        v.extend([Symbol::Plus, Symbol::Times, Symbol::Tree(Base::Binary), Symbol::Tree(Base::Decimal)]);
        v
    }

    /// The textual name used in weight files and listings.
    pub fn name(self) -> String {
        self.to_string()
    }

    pub fn from_name(s: &str) -> Result<Symbol, SymbolError> {
        let s = s.trim();
        match s {
            "S" => return Ok(Symbol::Succ),
            "P" => return Ok(Symbol::Pred),
            "-" | "neg" => return Ok(Symbol::Neg),
            "+" | "plus" => return Ok(Symbol::Plus),
            "*" | "·" | "times" => return Ok(Symbol::Times),
            "^b" => return Ok(Symbol::Tree(Base::Binary)),
            "^d" => return Ok(Symbol::Tree(Base::Decimal)),
            _ => {}
        }
        let unknown = || SymbolError::Unknown(s.to_string());
        if let Some(rest) = s.strip_prefix(':') {
            let mut cs = rest.chars();
            let base = cs.next().and_then(Base::from_letter).ok_or_else(unknown)?;
            let digit: u8 = cs.as_str().parse().map_err(|_| unknown())?;
            return Symbol::append(base, digit);
        }
        if s.len() == 1 {
            if let Some(d) = s.chars().next().and_then(|c| c.to_digit(10)) {
                return Ok(Symbol::Digit(d as u8));
            }
        }
        Err(unknown())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Digit(d) => write!(f, "{d}"),
            Symbol::Succ => f.write_str("S"),
            Symbol::Pred => f.write_str("P"),
            Symbol::Neg => f.write_str("-"),
            Symbol::Plus => f.write_str("+"),
            Symbol::Times => f.write_str("*"),
            Symbol::Append(b, d) => write!(f, ":{}{}", b.letter(), d),
            Symbol::Tree(b) => write!(f, "^{}", b.letter()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Style {
    Append,
    Tree,
}

/// The set of symbols a system is built over.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Signature {
    symbols: BTreeSet<Symbol>,
}

impl Signature {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> Signature {
        Signature { symbols: symbols.into_iter().collect() }
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols.iter().copied()
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.symbols.contains(&s)
    }

    pub fn insert(&mut self, s: Symbol) {
        self.symbols.insert(s);
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Base of the positional constructors, if any are present.
    pub fn base(&self) -> Option<Base> {
        self.symbols.iter().find_map(|s| s.base())
    }

    pub fn style(&self) -> Option<Style> {
        self.symbols.iter().find_map(|s| match s.kind() {
            SymbolKind::Append => Some(Style::Append),
            SymbolKind::TreeConstructor => Some(Style::Tree),
            _ => None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_is_dense_and_unique() {
        let all = Symbol::all();
        assert_eq!(all.len(), SYMBOL_COUNT);
        let mut seen = vec![false; SYMBOL_COUNT];
        for s in all {
            assert!(!seen[s.index()]);
            seen[s.index()] = true;
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Symbol::all() {
            assert_eq!(Symbol::from_name(&s.name()).unwrap(), s);
        }
    }

    #[test]
    fn append_digit_bounded_by_base() {
        assert!(Symbol::append(Base::Binary, 2).is_err());
        assert!(Symbol::append(Base::Decimal, 9).is_ok());
        assert!(Symbol::digit(10).is_err());
    }

    #[test]
    fn enumeration_order() {
        assert!(Symbol::Succ < Symbol::Pred);
        assert!(Symbol::Neg < Symbol::Append(Base::Binary, 0));
        assert!(Symbol::Append(Base::Binary, 1) < Symbol::Plus);
        assert!(Symbol::Times < Symbol::Tree(Base::Binary));
    }
}
