//! ASCII surface syntax for formulas.
//!
//! Precedence, loosest first: `<->` (non-associative), `->` (right),
//! `/\` `\/` (left), `&` `(+)` (left), prefix `N*`, postfix `^N`, prefix `~`.
//! Atoms are `0`, `1`, `M/N`, identifiers `[a-z][a-z0-9_]*`, `q<M/N>` and
//! parenthesized formulas.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::formula::{Formula, Variable};
use crate::rational::{fmt_rational, in_unit_interval, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ratio(BigInt, BigInt),
    Ident(String),
    QVar(Rational),
    LParen,
    RParen,
    Tilde,
    Caret,
    Star,
    Amp,
    Oplus,
    Wedge,
    Vee,
    Arrow,
    Biarrow,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn syntax(&self, offset: usize, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset,
            message: message.into(),
        }
    }

    fn digits(&mut self) -> BigInt {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().expect("digit run")
    }

    fn tokens(mut self) -> Result<Vec<(usize, Tok)>> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos >= self.bytes.len() {
                return Ok(out);
            }
            let start = self.pos;
            let rest = &self.src[start..];
            let c = self.bytes[start];
            let tok = if rest.starts_with("(+)") {
                self.pos += 3;
                Tok::Oplus
            } else if rest.starts_with("<->") {
                self.pos += 3;
                Tok::Biarrow
            } else if rest.starts_with("->") {
                self.pos += 2;
                Tok::Arrow
            } else if rest.starts_with("/\\") {
                self.pos += 2;
                Tok::Wedge
            } else if rest.starts_with("\\/") {
                self.pos += 2;
                Tok::Vee
            } else if c.is_ascii_digit() {
                let numer = self.digits();
                if self.bytes.get(self.pos) == Some(&b'/')
                    && self.bytes.get(self.pos + 1).is_some_and(u8::is_ascii_digit)
                {
                    self.pos += 1;
                    let denom = self.digits();
                    Tok::Ratio(numer, denom)
                } else {
                    Tok::Int(numer)
                }
            } else if c == b'q' && self.bytes.get(start + 1) == Some(&b'<') {
                self.pos += 2;
                self.q_index(start)?
            } else if c.is_ascii_lowercase() {
                while self.pos < self.bytes.len()
                    && (self.bytes[self.pos].is_ascii_lowercase()
                        || self.bytes[self.pos].is_ascii_digit()
                        || self.bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            } else {
                self.pos += 1;
                match c {
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b'~' => Tok::Tilde,
                    b'^' => Tok::Caret,
                    b'*' => Tok::Star,
                    b'&' => Tok::Amp,
                    _ => {
                        let ch = rest.chars().next().unwrap_or('?');
                        return Err(self.syntax(start, format!("unexpected character `{ch}`")));
                    }
                }
            };
            out.push((start, tok));
        }
    }

    fn q_index(&mut self, start: usize) -> Result<Tok> {
        if !self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            return Err(self.syntax(self.pos, "expected M/N inside q<...>"));
        }
        let numer = self.digits();
        let denom = if self.bytes.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            if !self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                return Err(self.syntax(self.pos, "expected denominator inside q<...>"));
            }
            self.digits()
        } else {
            BigInt::from(1)
        };
        if self.bytes.get(self.pos) != Some(&b'>') {
            return Err(self.syntax(self.pos, "expected `>` closing q<...>"));
        }
        self.pos += 1;
        let value = checked_ratio(numer, denom, start)?;
        Ok(Tok::QVar(value))
    }
}

fn checked_ratio(numer: BigInt, denom: BigInt, offset: usize) -> Result<Rational> {
    if denom.is_zero() {
        return Err(Error::Syntax {
            offset,
            message: "zero denominator".into(),
        });
    }
    let value = BigRational::new(numer, denom);
    if !in_unit_interval(&value) {
        return Err(Error::ConstantOutOfRange {
            offset,
            value: fmt_rational(&value),
        });
    }
    Ok(value)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.idx + 1).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(_, t)| t.clone());
        self.idx += 1;
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn equiv(&mut self) -> Result<Formula> {
        let lhs = self.implication()?;
        if self.peek() == Some(&Tok::Biarrow) {
            self.bump();
            let rhs = self.implication()?;
            if self.peek() == Some(&Tok::Biarrow) {
                return Err(self.error("`<->` is non-associative; add parentheses"));
            }
            return Ok(lhs.equiv(rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.lattice()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.implication()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn lattice(&mut self) -> Result<Formula> {
        let mut acc = self.strong()?;
        loop {
            match self.peek() {
                Some(Tok::Wedge) => {
                    self.bump();
                    acc = acc.min(self.strong()?);
                }
                Some(Tok::Vee) => {
                    self.bump();
                    acc = acc.max(self.strong()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn strong(&mut self) -> Result<Formula> {
        let mut acc = self.prefix()?;
        loop {
            match self.peek() {
                Some(Tok::Amp) => {
                    self.bump();
                    acc = acc.and(self.prefix()?);
                }
                Some(Tok::Oplus) => {
                    self.bump();
                    acc = acc.oplus(self.prefix()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn count(&mut self, n: &BigInt) -> Result<u64> {
        let value = u64::try_from(n).map_err(|_| self.error("count does not fit in 64 bits"))?;
        if value == 0 {
            return Err(Error::ZeroExponent {
                offset: self.offset(),
            });
        }
        Ok(value)
    }

    fn prefix(&mut self) -> Result<Formula> {
        if let (Some(Tok::Int(n)), Some(Tok::Star)) = (self.peek(), self.peek2()) {
            let n = n.clone();
            let k = self.count(&n)?;
            self.bump();
            self.bump();
            return Ok(self.prefix()?.multiple(k));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Formula> {
        let mut acc = self.unary()?;
        while self.peek() == Some(&Tok::Caret) {
            self.bump();
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    let k = self.count(&n)?;
                    self.bump();
                    acc = acc.power(k);
                }
                _ => return Err(self.error("expected an exponent after `^`")),
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.peek() == Some(&Tok::Tilde) {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(Formula::Const(checked_ratio(n, BigInt::from(1), offset)?)),
            Some(Tok::Ratio(n, d)) => Ok(Formula::Const(checked_ratio(n, d, offset)?)),
            Some(Tok::Ident(name)) => Ok(Formula::Var(Variable::plain(name))),
            Some(Tok::QVar(r)) => Ok(Formula::Var(Variable::q(r))),
            Some(Tok::LParen) => {
                let inner = self.equiv()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.error("expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            Some(_) => {
                self.idx -= 1;
                Err(self.error("expected a formula"))
            }
            None => Err(self.error("unexpected end of input")),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = Lexer::new(text).tokens()?;
    let mut parser = Parser {
        toks,
        idx: 0,
        end: text.len(),
    };
    let f = parser.equiv()?;
    if parser.idx < parser.toks.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(f)
}

const EQUIV: u8 = 0;
const IMPLIES: u8 = 1;
const LATTICE: u8 = 2;
const STRONG: u8 = 3;
const PREFIX: u8 = 4;
const UNARY: u8 = 6;
const ATOM: u8 = 7;

pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    render_into(f, EQUIV, &mut out);
    out
}

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Equiv(..) => EQUIV,
        Formula::Implies(..) => IMPLIES,
        Formula::Min(..) | Formula::Max(..) => LATTICE,
        Formula::And(..) | Formula::Oplus(..) => STRONG,
        Formula::Multiple(..) => PREFIX,
        Formula::Power(..) => 5,
        Formula::Neg(_) => UNARY,
        Formula::Const(_) | Formula::Var(_) => ATOM,
    }
}

fn render_into(f: &Formula, min_level: u8, out: &mut String) {
    if level(f) < min_level {
        out.push('(');
        render_into(f, EQUIV, out);
        out.push(')');
        return;
    }
    let mut binary = |a: &Formula, op: &str, b: &Formula, left: u8, right: u8| {
        render_into(a, left, out);
        out.push_str(op);
        render_into(b, right, out);
    };
    match f {
        Formula::Const(r) => out.push_str(&fmt_rational(r)),
        Formula::Var(v) => out.push_str(v.name()),
        Formula::Equiv(a, b) => binary(a, " <-> ", b, IMPLIES, IMPLIES),
        Formula::Implies(a, b) => binary(a, " -> ", b, LATTICE, IMPLIES),
        Formula::Min(a, b) => binary(a, " /\\ ", b, LATTICE, STRONG),
        Formula::Max(a, b) => binary(a, " \\/ ", b, LATTICE, STRONG),
        Formula::And(a, b) => binary(a, " & ", b, STRONG, PREFIX),
        Formula::Oplus(a, b) => binary(a, " (+) ", b, STRONG, PREFIX),
        Formula::Multiple(n, a) => {
            out.push_str(&format!("{n}*"));
            render_into(a, PREFIX, out);
        }
        Formula::Power(a, n) => {
            render_into(a, ATOM, out);
            out.push_str(&format!("^{n}"));
        }
        Formula::Neg(a) => {
            out.push('~');
            render_into(a, UNARY, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn x() -> Formula {
        Formula::var("x")
    }

    #[test]
    fn parses_single_implication() {
        assert_eq!(parse_formula("x -> x").unwrap(), x().implies(x()));
    }

    #[test]
    fn parses_rational_constants() {
        assert_eq!(
            parse_formula("6/13 -> 5/13").unwrap(),
            Formula::Const(rat(6, 13)).implies(Formula::Const(rat(5, 13)))
        );
    }

    #[test]
    fn negation_binds_tighter_than_power() {
        assert_eq!(parse_formula("~x ^ 4").unwrap(), x().neg().power(4));
    }

    #[test]
    fn renders_examples() {
        assert_eq!(render_formula(&x().implies(x())), "x -> x");
        assert_eq!(render_formula(&x().neg().power(2)), "(~x)^2");
        assert_eq!(
            render_formula(&Formula::q(rat(1, 4)).multiple(3)),
            "3*q<1/4>"
        );
    }

    #[test]
    fn equivalence_is_loosest() {
        let f = parse_formula("q<6/13> -> q<5/13> <-> q<12/13>").unwrap();
        assert_eq!(
            f,
            Formula::q(rat(6, 13))
                .implies(Formula::q(rat(5, 13)))
                .equiv(Formula::q(rat(12, 13)))
        );
    }

    #[test]
    fn associativity() {
        let (a, b, c) = (Formula::var("a"), Formula::var("b"), Formula::var("c"));
        assert_eq!(
            parse_formula("a -> b -> c").unwrap(),
            a.clone().implies(b.clone().implies(c.clone()))
        );
        assert_eq!(
            parse_formula("a & b (+) c").unwrap(),
            a.clone().and(b.clone()).oplus(c.clone())
        );
        assert_eq!(
            parse_formula("a \\/ b /\\ c").unwrap(),
            a.clone().max(b.clone()).min(c.clone())
        );
        assert_eq!(
            parse_formula("3*x^2").unwrap(),
            x().power(2).multiple(3)
        );
        assert!(parse_formula("a <-> b <-> c").is_err());
    }

    #[test]
    fn q_variables_are_canonicalized() {
        assert_eq!(parse_formula("q<2/4>").unwrap(), Formula::q(rat(1, 2)));
        assert_eq!(render_formula(&parse_formula("q<0/7>").unwrap()), "q<0>");
    }

    #[test]
    fn errors_carry_offsets() {
        match parse_formula("x -> ") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse_formula("x & 3/2") {
            Err(Error::ConstantOutOfRange { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_formula("x^0"),
            Err(Error::ZeroExponent { offset: 2 })
        ));
        assert!(matches!(
            parse_formula("0*x"),
            Err(Error::ZeroExponent { offset: 0 })
        ));
        assert!(matches!(parse_formula("2"), Err(Error::ConstantOutOfRange { .. })));
        assert!(matches!(parse_formula("x $ y"), Err(Error::Syntax { offset: 2, .. })));
        assert!(parse_formula("(x").is_err());
        assert!(parse_formula("x y").is_err());
        assert!(parse_formula("q<3/2>").is_err());
    }

    #[test]
    fn nested_unary_and_prefix_rendering() {
        for text in [
            "~~x",
            "~(x^2)",
            "(x^2)^3",
            "~(3*x)",
            "(3*x)^2",
            "2*3*x",
            "(a -> b) -> c",
            "(a <-> b) <-> c",
            "a & (b & c)",
            "(a \\/ b) & c",
            "1 /\\ 0",
            "aux3_y0 <-> ~q<1/5>",
        ] {
            let f = parse_formula(text).unwrap();
            assert_eq!(render_formula(&f), text, "render of {text}");
        }
    }
}
