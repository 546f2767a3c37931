//! Infix text syntax for terms and rule templates.
//!
//! Precedence, loosest first: `+`, `*` (or `·`), `^b`/`^d`, postfix append `:b0`,
//! prefix `-`. Binary operators do not associate; nesting needs parentheses.

use std::fmt;

use thiserror::Error;

use crate::schema::{DigitExpr, Meta, Template, ToTermError};
use crate::symbol::{Base, Symbol};
use crate::term::{Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{0}` takes exactly one argument")]
    Arity(String),
    #[error("nested `{0}` must be parenthesized")]
    Nested(String),
    #[error("digit placeholder `{0}` not allowed in a term")]
    MetaInTerm(String),
    #[error("malformed digit placeholder `{0}`")]
    BadMeta(String),
    #[error("expected `->`")]
    MissingArrow,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Digit(DigitExpr),
    Ident(String),
    LParen,
    RParen,
    Plus,
    Star,
    Minus,
    Arrow,
    Append(Base, DigitExpr),
    Tree(Base),
    Power(DigitExpr),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Digit(d) => write!(f, "digit `{d}`"),
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Append(b, d) => write!(f, "`:{}{}`", b.letter(), d),
            Tok::Tree(b) => write!(f, "`^{}`", b.letter()),
            Tok::Power(d) => write!(f, "`^{d}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line, col, kind }
    }

    fn digit_slot(&mut self, line: usize, col: usize) -> Result<DigitExpr, ParseError> {
        match self.chars.peek().copied() {
            Some(c) if c.is_ascii_digit() => {
                self.bump();
                Ok(DigitExpr::Lit(c as u8 - b'0'))
            }
            Some('{') => {
                self.bump();
                let mut body = String::new();
                loop {
                    match self.bump() {
                        Some('}') => break,
                        Some(c) => body.push(c),
                        None => return Err(self.err(self.line, self.col, ParseErrorKind::UnexpectedEnd)),
                    }
                }
                parse_digit_expr(&body).ok_or_else(|| self.err(line, col, ParseErrorKind::BadMeta(body)))
            }
            Some(c) => Err(self.err(self.line, self.col, ParseErrorKind::UnexpectedChar(c))),
            None => Err(self.err(self.line, self.col, ParseErrorKind::UnexpectedEnd)),
        }
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let (line, col) = (self.line, self.col);
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let tok = match c {
                '0'..='9' => {
                    self.bump();
                    Tok::Digit(DigitExpr::Lit(c as u8 - b'0'))
                }
                '{' => Tok::Digit(self.digit_slot(line, col)?),
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                '+' => {
                    self.bump();
                    Tok::Plus
                }
                '*' | '·' => {
                    self.bump();
                    Tok::Star
                }
                '-' | '−' => {
                    self.bump();
                    if c == '-' && self.chars.peek() == Some(&'>') {
                        self.bump();
                        Tok::Arrow
                    } else {
                        Tok::Minus
                    }
                }
                '→' => {
                    self.bump();
                    Tok::Arrow
                }
                ':' => {
                    self.bump();
                    let b = self.bump();
                    let base = b.and_then(Base::from_letter).ok_or_else(|| match b {
                        Some(b) => self.err(line, col + 1, ParseErrorKind::UnexpectedChar(b)),
                        None => self.err(line, col + 1, ParseErrorKind::UnexpectedEnd),
                    })?;
                    Tok::Append(base, self.digit_slot(line, col)?)
                }
                '^' => {
                    self.bump();
                    match self.chars.peek().copied() {
                        Some(b @ ('b' | 'd')) => {
                            self.bump();
                            Tok::Tree(Base::from_letter(b).unwrap())
                        }
                        _ => Tok::Power(self.digit_slot(line, col)?),
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let mut s = String::new();
                    while let Some(&c) = self.chars.peek() {
                        if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                            s.push(c);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Ident(s)
                }
                other => return Err(self.err(line, col, ParseErrorKind::UnexpectedChar(other))),
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

fn parse_digit_expr(body: &str) -> Option<DigitExpr> {
    let body = body.trim();
    if let Ok(v) = body.parse::<u8>() {
        return (v <= 9).then_some(DigitExpr::Lit(v));
    }
    let mut cs = body.chars();
    let meta = match cs.next()? {
        'i' => Meta::I,
        'j' => Meta::J,
        _ => return None,
    };
    match cs.as_str() {
        "" => Some(DigitExpr::Meta(meta)),
        "'" | "′" => Some(DigitExpr::Succ(meta)),
        "*" | "★" => Some(DigitExpr::Star(meta)),
        _ => None,
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        let toks = Lexer::new(text).tokens()?;
        let lines: Vec<&str> = text.split('\n').collect();
        let end = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
        Ok(Parser { toks, pos: 0, end })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.col))
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        let (line, col) = self.here();
        ParseError { line, col, kind }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(t) => self.err(ParseErrorKind::UnexpectedToken(t.to_string())),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn sum(&mut self) -> Result<Template, ParseError> {
        let left = self.prod()?;
        if self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            let right = self.prod()?;
            if self.peek() == Some(&Tok::Plus) {
                return Err(self.err(ParseErrorKind::Nested("+".into())));
            }
            return Ok(Template::Op(Symbol::Plus, vec![left, right]));
        }
        Ok(left)
    }

    fn prod(&mut self) -> Result<Template, ParseError> {
        let left = self.tree()?;
        if self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let right = self.tree()?;
            if self.peek() == Some(&Tok::Star) {
                return Err(self.err(ParseErrorKind::Nested("*".into())));
            }
            return Ok(Template::Op(Symbol::Times, vec![left, right]));
        }
        Ok(left)
    }

    fn tree(&mut self) -> Result<Template, ParseError> {
        let left = self.post()?;
        if let Some(Tok::Tree(b)) = self.peek().cloned() {
            self.pos += 1;
            let right = self.post()?;
            if matches!(self.peek(), Some(Tok::Tree(_))) {
                return Err(self.err(ParseErrorKind::Nested(format!("^{}", b.letter()))));
            }
            return Ok(Template::Op(Symbol::Tree(b), vec![left, right]));
        }
        Ok(left)
    }

    fn post(&mut self) -> Result<Template, ParseError> {
        let mut t = self.unary()?;
        while let Some(Tok::Append(b, d)) = self.peek().cloned() {
            self.pos += 1;
            t = Template::Append(b, d, Box::new(t));
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<Template, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Template::Op(Symbol::Neg, vec![inner]));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Template, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Digit(d)) => {
                self.pos += 1;
                Ok(Template::Digit(d))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let fun = match name.as_str() {
                    "S" => Some(Symbol::Succ),
                    "P" => Some(Symbol::Pred),
                    _ => None,
                };
                let Some(sym) = fun else {
                    if self.peek() == Some(&Tok::LParen) {
                        self.pos -= 1;
                        return Err(self.err(ParseErrorKind::UnknownSymbol(name)));
                    }
                    return Ok(Template::Var(Var::new(&name)));
                };
                let power = if let Some(Tok::Power(d)) = self.peek().cloned() {
                    self.pos += 1;
                    Some(d)
                } else {
                    None
                };
                self.expect(Tok::LParen)?;
                let arg = self.sum()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err(ParseErrorKind::Arity(name)));
                }
                self.pos += 1;
                Ok(match power {
                    Some(d) => Template::Power(sym, d, Box::new(arg)),
                    None => Template::Op(sym, vec![arg]),
                })
            }
            _ => Err(self.unexpected()),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.unexpected())
        } else {
            Ok(())
        }
    }
}

/// Parses a rule template that may contain `{i}`, `{i'}`, `{i*}` slots and `S^{j}(..)` powers.
pub fn parse_template(text: &str) -> Result<Template, ParseError> {
    let mut p = Parser::new(text)?;
    let t = p.sum()?;
    p.finish()?;
    Ok(t)
}

/// Parses `lhs -> rhs` into two templates.
pub fn parse_rule_templates(text: &str) -> Result<(Template, Template), ParseError> {
    let mut p = Parser::new(text)?;
    let lhs = p.sum()?;
    if p.next() != Some(Tok::Arrow) {
        p.pos = p.pos.saturating_sub(1);
        return Err(p.err(ParseErrorKind::MissingArrow));
    }
    let rhs = p.sum()?;
    p.finish()?;
    Ok((lhs, rhs))
}

/// Parses a concrete term.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    let tmpl = parse_template(text)?;
    tmpl.to_term().map_err(term_error)
}

fn term_error(e: ToTermError) -> ParseError {
    let kind = match e {
        ToTermError::Meta(slot) => ParseErrorKind::MetaInTerm(slot),
        ToTermError::OutOfRange(sym) => ParseErrorKind::UnknownSymbol(sym),
    };
    ParseError { line: 1, col: 1, kind }
}

/// Parses `lhs -> rhs` into two concrete terms.
pub fn parse_rule(text: &str) -> Result<(Term, Term), ParseError> {
    let (l, r) = parse_rule_templates(text)?;
    Ok((l.to_term().map_err(term_error)?, r.to_term().map_err(term_error)?))
}

const LEVEL_SUM: u8 = 0;
const LEVEL_PROD: u8 = 1;
const LEVEL_TREE: u8 = 2;
const LEVEL_POST: u8 = 3;
const LEVEL_ATOM: u8 = 4;

fn level(t: &Term) -> u8 {
    match t {
        Term::App(Symbol::Plus, _) => LEVEL_SUM,
        Term::App(Symbol::Times, _) => LEVEL_PROD,
        Term::App(Symbol::Append(..), _) => LEVEL_POST,
        _ => LEVEL_ATOM,
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, min: u8) -> fmt::Result {
    let paren = level(t) < min;
    if paren {
        f.write_str("(")?;
    }
    match t {
        Term::Var(v) => f.write_str(v.name())?,
        Term::App(sym, args) => match sym {
            Symbol::Digit(d) => write!(f, "{d}")?,
            Symbol::Succ | Symbol::Pred | Symbol::Neg => {
                write!(f, "{sym}(")?;
                write_term(f, &args[0], LEVEL_SUM)?;
                f.write_str(")")?;
            }
            Symbol::Plus => {
                write_term(f, &args[0], LEVEL_PROD)?;
                f.write_str(" + ")?;
                write_term(f, &args[1], LEVEL_PROD)?;
            }
            Symbol::Times => {
                write_term(f, &args[0], LEVEL_TREE)?;
                f.write_str(" * ")?;
                write_term(f, &args[1], LEVEL_TREE)?;
            }
            Symbol::Append(..) => {
                write_term(f, &args[0], LEVEL_POST)?;
                write!(f, " {sym}")?;
            }
            Symbol::Tree(_) => {
                f.write_str("(")?;
                write_term(f, &args[0], LEVEL_POST)?;
                write!(f, " {sym} ")?;
                write_term(f, &args[1], LEVEL_POST)?;
                f.write_str(")")?;
            }
        },
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, LEVEL_SUM)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn reads_grammar_examples() {
        assert_eq!(t("0"), Term::digit(0));
        assert_eq!(t("S(x :b0)"), Term::succ(Term::append(Base::Binary, 0, Term::var("x"))));
        assert_eq!(
            t("(-(y :d3)) + (x :d1)"),
            Term::plus(
                Term::neg(Term::append(Base::Decimal, 3, Term::var("y"))),
                Term::append(Base::Decimal, 1, Term::var("x"))
            )
        );
    }

    #[test]
    fn precedence() {
        assert_eq!(t("-x :d1"), Term::append(Base::Decimal, 1, Term::neg(Term::var("x"))));
        assert_eq!(t("x * y :b1"), Term::times(Term::var("x"), Term::append(Base::Binary, 1, Term::var("y"))));
        assert_eq!(t("x + y * z"), Term::plus(Term::var("x"), Term::times(Term::var("y"), Term::var("z"))));
        assert_eq!(t("1 ^d 2"), Term::tree(Base::Decimal, Term::digit(1), Term::digit(2)));
        assert_eq!(t("x·0"), Term::times(Term::var("x"), Term::digit(0)));
        assert_eq!(t("−1"), Term::neg(Term::digit(1)));
    }

    #[test]
    fn formats() {
        assert_eq!(Term::digit(1).to_string(), "1");
        assert_eq!(Term::append(Base::Binary, 1, Term::digit(1)).to_string(), "1 :b1");
        assert_eq!(t("-S(-x)").to_string(), "-(S(-(x)))");
        assert_eq!(t("(x + y) :b0").to_string(), "(x + y) :b0");
        assert_eq!(t("(1 ^d 2) ^d 3").to_string(), "((1 ^d 2) ^d 3)");
        assert_eq!(t("x + (y + z)").to_string(), "x + (y + z)");
    }

    #[test]
    fn rejects_nested_and_unknown() {
        assert!(matches!(parse("1 + 1 + 1").unwrap_err().kind, ParseErrorKind::Nested(_)));
        assert!(matches!(parse("f(x)").unwrap_err().kind, ParseErrorKind::UnknownSymbol(_)));
        assert!(matches!(parse("x :b2").unwrap_err().kind, ParseErrorKind::UnknownSymbol(_)));
        assert!(matches!(parse("S(x").unwrap_err().kind, ParseErrorKind::UnexpectedEnd | ParseErrorKind::Arity(_)));
        assert!(matches!(parse("x :b{i}").unwrap_err().kind, ParseErrorKind::MetaInTerm(_)));
        let e = parse("x +\n  # 1").unwrap_err();
        assert_eq!((e.line, e.col), (2, 3));
    }

    #[test]
    fn parses_rules() {
        let (l, r) = parse_rule("x + 0 -> x").unwrap();
        assert_eq!(l, t("x + 0"));
        assert_eq!(r, t("x"));
        assert!(matches!(parse_rule("x + 0").unwrap_err().kind, ParseErrorKind::MissingArrow));
    }
}
