//! Rule schemata with digit counters and their expansion into concrete rules.

use std::fmt;

use thiserror::Error;

use crate::symbol::{Base, Symbol};
use crate::term::{Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Meta {
    I,
    J,
}

impl fmt::Display for Meta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Meta::I => "i",
            Meta::J => "j",
        })
    }
}

/// A digit slot in a template.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DigitExpr {
    Lit(u8),
    Meta(Meta),
    /// The counter plus one.
    Succ(Meta),
    /// The base minus the counter.
    Star(Meta),
}

impl fmt::Display for DigitExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DigitExpr::Lit(v) => write!(f, "{v}"),
            DigitExpr::Meta(m) => write!(f, "{{{m}}}"),
            DigitExpr::Succ(m) => write!(f, "{{{m}'}}"),
            DigitExpr::Star(m) => write!(f, "{{{m}*}}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("counter `{0}` used but not declared")]
    Undeclared(Meta),
    #[error("`{expr}` evaluates to {value}, outside 0..{limit}")]
    OutOfRange { expr: String, value: i32, limit: u8 },
    #[error("rule {name}: {reason}")]
    BadRule { name: String, reason: String },
}

/// Values of the declared counters.
#[derive(Clone, Copy, Debug, Default)]
pub struct Env {
    pub i: Option<u8>,
    pub j: Option<u8>,
}

impl Env {
    fn get(&self, m: Meta) -> Result<u8, SchemaError> {
        match m {
            Meta::I => self.i,
            Meta::J => self.j,
        }
        .ok_or(SchemaError::Undeclared(m))
    }
}

impl DigitExpr {
    /// Value under `env`; `limit` is the exclusive bound for the slot (10 for constants,
    /// the radix for appends) and `base` feeds the complement.
    pub fn eval(&self, env: &Env, base: Base, limit: u8) -> Result<u8, SchemaError> {
        let value: i32 = match *self {
            DigitExpr::Lit(v) => v as i32,
            DigitExpr::Meta(m) => env.get(m)? as i32,
            DigitExpr::Succ(m) => env.get(m)? as i32 + 1,
            DigitExpr::Star(m) => base.radix() as i32 - env.get(m)? as i32,
        };
        let limit = match self {
            DigitExpr::Star(_) => limit.min(base.radix()),
            _ => limit,
        };
        if (0..limit as i32).contains(&value) {
            Ok(value as u8)
        } else {
            Err(SchemaError::OutOfRange { expr: self.to_string(), value, limit })
        }
    }

    fn is_literal(&self) -> bool {
        matches!(self, DigitExpr::Lit(_))
    }
}

/// A term with digit slots and repeated applications.
#[derive(Clone, Debug, PartialEq)]
pub enum Template {
    Var(Var),
    Digit(DigitExpr),
    /// S, P, neg, plus, times or a tree constructor applied to templates.
    Op(Symbol, Vec<Template>),
    Append(Base, DigitExpr, Box<Template>),
    /// `S` or `P` applied the given number of times.
    Power(Symbol, DigitExpr, Box<Template>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ToTermError {
    Meta(String),
    OutOfRange(String),
}

impl Template {
    /// Instantiates a template without counters.
    pub fn to_term(&self) -> Result<Term, ToTermError> {
        self.check_literal()?;
        self.instantiate(&Env::default(), Base::Decimal).map_err(|e| ToTermError::OutOfRange(e.to_string()))
    }

    fn check_literal(&self) -> Result<(), ToTermError> {
        match self {
            Template::Var(_) => Ok(()),
            Template::Digit(d) => lit_or_err(d),
            Template::Op(_, args) => args.iter().try_for_each(Template::check_literal),
            Template::Append(b, d, inner) => {
                lit_or_err(d)?;
                if let DigitExpr::Lit(v) = d {
                    if *v >= b.radix() {
                        return Err(ToTermError::OutOfRange(format!(":{}{}", b.letter(), v)));
                    }
                }
                inner.check_literal()
            }
            Template::Power(_, d, inner) => {
                lit_or_err(d)?;
                inner.check_literal()
            }
        }
    }

    /// Instantiates the counters. `base` is the radix the complement refers to.
    pub fn instantiate(&self, env: &Env, base: Base) -> Result<Term, SchemaError> {
        Ok(match self {
            Template::Var(v) => Term::Var(v.clone()),
            Template::Digit(d) => Term::App(Symbol::Digit(d.eval(env, base, 10)?), Vec::new()),
            Template::Op(s, args) => {
                Term::App(*s, args.iter().map(|a| a.instantiate(env, base)).collect::<Result<_, _>>()?)
            }
            Template::Append(b, d, inner) => {
                let digit = d.eval(env, base, b.radix())?;
                Term::App(Symbol::Append(*b, digit), vec![inner.instantiate(env, base)?])
            }
            Template::Power(s, d, inner) => {
                let k = d.eval(env, base, 10)?;
                let mut t = inner.instantiate(env, base)?;
                for _ in 0..k {
                    t = Term::App(*s, vec![t]);
                }
                t
            }
        })
    }
}

fn lit_or_err(d: &DigitExpr) -> Result<(), ToTermError> {
    if d.is_literal() {
        Ok(())
    } else {
        Err(ToTermError::Meta(d.to_string()))
    }
}

/// A concrete rewrite rule.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    /// Checks that the lhs is not a variable and the rhs introduces no variables.
    pub fn new(name: impl Into<String>, lhs: Term, rhs: Term) -> Result<Rule, SchemaError> {
        let name = name.into();
        if lhs.is_var() {
            return Err(SchemaError::BadRule { name, reason: "left-hand side is a variable".into() });
        }
        let lv = lhs.vars();
        if let Some(v) = rhs.vars().into_iter().find(|v| !lv.contains(v)) {
            return Err(SchemaError::BadRule { name, reason: format!("right-hand side has fresh variable `{v}`") });
        }
        Ok(Rule { name, lhs, rhs })
    }
}

impl serde::Serialize for Rule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Rule", 3)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("lhs", &self.lhs)?;
        st.serialize_field("rhs", &self.rhs)?;
        st.end()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} -> {}", self.name, self.lhs, self.rhs)
    }
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetaRange {
    pub meta: Meta,
    pub lo: u8,
    pub hi: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RuleSchema {
    pub name: String,
    pub metas: Vec<MetaRange>,
    pub lhs: Template,
    pub rhs: Template,
    pub base: Base,
}

/// One rule per counter instantiation, in lexicographic order; names get `.i` / `.i.j` suffixes.
pub fn expand_schema(s: &RuleSchema) -> Result<Vec<Rule>, SchemaError> {
    let mut envs = vec![(Env::default(), String::new())];
    for r in &s.metas {
        let mut next = Vec::new();
        for (env, suffix) in &envs {
            for v in r.lo..=r.hi {
                let mut e = *env;
                match r.meta {
                    Meta::I => e.i = Some(v),
                    Meta::J => e.j = Some(v),
                }
                next.push((e, format!("{suffix}.{v}")));
            }
        }
        envs = next;
    }
    envs.into_iter()
        .map(|(env, suffix)| {
            let lhs = s.lhs.instantiate(&env, s.base)?;
            let rhs = s.rhs.instantiate(&env, s.base)?;
            Rule::new(format!("{}{}", s.name, suffix), lhs, rhs)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, parse_rule_templates};

    fn schema(name: &str, metas: &[(Meta, u8, u8)], text: &str, base: Base) -> RuleSchema {
        let (lhs, rhs) = parse_rule_templates(text).unwrap();
        RuleSchema {
            name: name.into(),
            metas: metas.iter().map(|&(meta, lo, hi)| MetaRange { meta, lo, hi }).collect(),
            lhs,
            rhs,
            base,
        }
    }

    #[test]
    fn expands_in_lexicographic_order_with_powers() {
        let s = schema(
            "b10",
            &[(Meta::I, 0, 1), (Meta::J, 0, 1)],
            "x :b{i} + y :b{j} -> S^{j}((x + y) :b{i})",
            Base::Binary,
        );
        let rules = expand_schema(&s).unwrap();
        let names: Vec<&str> = rules.iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["b10.0.0", "b10.0.1", "b10.1.0", "b10.1.1"]);
        assert_eq!(rules[2].rhs, parse("(x + y) :b1").unwrap());
        assert_eq!(rules[3].rhs, parse("S((x + y) :b1)").unwrap());
    }

    #[test]
    fn complement_and_successor() {
        let s = schema("d26", &[(Meta::I, 1, 9)], "-(x) :d{i} -> -(P(x) :d{i*})", Base::Decimal);
        let rules = expand_schema(&s).unwrap();
        assert_eq!(rules.len(), 9);
        assert_eq!(rules[0].rhs, parse("-(P(x) :d9)").unwrap());
        let bad = schema("d26", &[(Meta::I, 0, 9)], "-(x) :d{i} -> -(P(x) :d{i*})", Base::Decimal);
        assert!(matches!(expand_schema(&bad), Err(SchemaError::OutOfRange { .. })));
        let succ = schema("d2", &[(Meta::I, 0, 9)], "S({i}) -> {i'}", Base::Decimal);
        assert!(expand_schema(&succ).is_err());
    }

    #[test]
    fn rule_invariants() {
        assert!(Rule::new("r", parse("x").unwrap(), parse("0").unwrap()).is_err());
        assert!(Rule::new("r", parse("S(x)").unwrap(), parse("y").unwrap()).is_err());
        assert!(Rule::new("r", parse("S(x)").unwrap(), parse("x").unwrap()).is_ok());
    }
}
