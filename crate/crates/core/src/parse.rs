//! Text syntax for algebra elements and fractions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/')? unary)*      juxtaposition multiplies
//! unary   := '-' unary | atom
//! atom    := '[' label label ']' | int ('/' int)? | '(' expr ')' | name '(' args ')'
//! ```
//!
//! Functions: `cross(X,Y,x,y)`, `mf(X1 X2 | x1 x2 | (1 2))`, `elem(g1,g2,...)`,
//! `pbeta(g,y)` and `wolpert(g,h)`. Division is allowed by scalars and by
//! fractions whose numerator is a single monomial.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fractions::{
    cross_fraction, elementary, length_cross_fraction, multi_fraction, parse_cycles, wolpert_rhs, BalancedFraction,
    CrossFractionSpec, ElementarySpec,
};
use crate::linking::PointConfig;
use crate::swapalg::{AlgebraElement, Coeff};
use crate::words::Word;

/// A parsed expression: polynomial when the denominator is trivial.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Element(AlgebraElement),
    Fraction(BalancedFraction),
}

impl Expr {
    pub fn into_fraction(self) -> BalancedFraction {
        match self {
            Expr::Element(e) => BalancedFraction::from_element(e),
            Expr::Fraction(f) => f,
        }
    }

    pub fn as_element(&self) -> Option<&AlgebraElement> {
        match self {
            Expr::Element(e) => Some(e),
            Expr::Fraction(_) => None,
        }
    }

    fn from_fraction(f: BalancedFraction) -> Self {
        match f.as_element() {
            Some(e) => Expr::Element(e),
            None => Expr::Fraction(f),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Element(e) => write!(f, "{}", e),
            Expr::Fraction(q) => write!(f, "{}", q),
        }
    }
}

pub fn parse_expression(text: &str, cfg: &Arc<PointConfig>) -> Result<Expr> {
    let mut p = Parser { src: text, pos: 0, cfg };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error(format!("unexpected `{}`", p.peek().unwrap_or(' '))));
    }
    Ok(Expr::from_fraction(v))
}

/// Parse an exact rational `p/q` or integer.
pub fn parse_coeff(text: &str) -> Result<Coeff> {
    let t = text.trim();
    let bad = || Error::InvalidInput(format!("invalid rational `{}`", t));
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Coeff::new(n, d))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    cfg: &'a Arc<PointConfig>,
}

const LABEL_STOP: &[char] = &[',', ']', '|', '[', '*', '/'];

impl Parser<'_> {
    fn error(&self, message: String) -> Error {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
        Error::Syntax { line, column, message }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected `{}`", c)))
        }
    }

    fn constant(&self, c: Coeff) -> BalancedFraction {
        BalancedFraction::from_element(AlgebraElement::constant(self.cfg, c))
    }

    fn expr(&mut self) -> Result<BalancedFraction> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.bump();
                    acc = acc.checked_add(&self.term()?)?;
                }
                Some('-') => {
                    self.bump();
                    acc = acc.checked_sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<BalancedFraction> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('*') => {
                    self.bump();
                    acc = acc.checked_mul(&self.unary()?)?;
                }
                Some('/') => {
                    self.bump();
                    let at = self.pos;
                    let d = self.unary()?;
                    if d.is_zero() {
                        self.pos = at;
                        return Err(self.error("division by zero".into()));
                    }
                    acc = acc.checked_div(&d)?;
                }
                Some(c) if c == '[' || c == '(' || c.is_ascii_alphanumeric() => {
                    acc = acc.checked_mul(&self.unary()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<BalancedFraction> {
        self.skip_ws();
        if self.peek() == Some('-') {
            self.bump();
            return Ok(self.unary()?.scale_by(&Coeff::from_integer((-1).into())));
        }
        self.atom()
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if start == self.pos {
            return Err(self.error("expected an integer".into()));
        }
        Ok(self.src[start..self.pos].parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<BalancedFraction> {
        self.skip_ws();
        match self.peek() {
            Some('[') => {
                self.bump();
                let a = self.label()?;
                let b = self.label()?;
                self.expect(']')?;
                let (ia, ib) = (self.lookup(&a)?, self.lookup(&b)?);
                Ok(BalancedFraction::from_element(AlgebraElement::generator(self.cfg, ia, ib)))
            }
            Some('(') => {
                self.bump();
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                // `p/q` binds tighter than division when q is a literal.
                let save = self.pos;
                self.skip_ws();
                if self.peek() == Some('/') {
                    self.bump();
                    self.skip_ws();
                    if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                        let at = self.pos;
                        let d = self.integer()?;
                        if d.is_zero() {
                            self.pos = at;
                            return Err(self.error("zero denominator".into()));
                        }
                        return Ok(self.constant(Coeff::new(n, d)));
                    }
                }
                self.pos = save;
                Ok(self.constant(Coeff::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    self.bump();
                }
                let name = self.src[start..self.pos].to_string();
                self.expect('(')?;
                let at = start;
                let v = self.function(&name, at)?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }

    /// A point label: a run of non-space characters, with balanced parentheses
    /// allowed inside (as in `g(h+)`).
    fn label(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || LABEL_STOP.contains(&c) {
                break;
            }
            if c == '(' {
                depth += 1;
            } else if c == ')' {
                if depth == 0 {
                    break;
                }
                depth -= 1;
            }
            self.bump();
        }
        if start == self.pos {
            return Err(self.error("expected a label".into()));
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn lookup(&self, label: &str) -> Result<usize> {
        self.cfg.id(label)
    }

    fn args(&mut self) -> Result<Vec<String>> {
        let mut out = vec![self.label()?];
        loop {
            self.skip_ws();
            if self.peek() != Some(',') {
                return Ok(out);
            }
            self.bump();
            out.push(self.label()?);
        }
    }

    fn labels_until(&mut self, stop: char) -> Result<Vec<String>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            if self.peek() == Some(stop) || self.peek().is_none() {
                return Ok(out);
            }
            out.push(self.label()?);
        }
    }

    fn function(&mut self, name: &str, at: usize) -> Result<BalancedFraction> {
        let arity = |p: &mut Self, args: &[String], k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                p.pos = at;
                Err(p.error(format!("`{}` takes {} arguments, found {}", name, k, args.len())))
            }
        };
        match name {
            "cross" => {
                let a = self.args()?;
                arity(self, &a, 4)?;
                let spec = CrossFractionSpec::from_labels(self.cfg, [&a[0], &a[1], &a[2], &a[3]])?;
                cross_fraction(self.cfg, spec)
            }
            "mf" => {
                let big = self.labels_until('|')?;
                self.expect('|')?;
                let small = self.labels_until('|')?;
                self.expect('|')?;
                let start = self.pos;
                let mut depth = 0usize;
                while let Some(c) = self.peek() {
                    if c == '(' {
                        depth += 1;
                    } else if c == ')' {
                        if depth == 0 {
                            break;
                        }
                        depth -= 1;
                    }
                    self.bump();
                }
                let sigma = parse_cycles(&self.src[start..self.pos], big.len())?;
                let big: Vec<usize> = big.iter().map(|l| self.lookup(l)).collect::<Result<_>>()?;
                let small: Vec<usize> = small.iter().map(|l| self.lookup(l)).collect::<Result<_>>()?;
                multi_fraction(self.cfg, &big, &small, &sigma)
            }
            "elem" => {
                let a = self.args()?;
                let refs: Vec<&str> = a.iter().map(String::as_str).collect();
                elementary(self.cfg, &ElementarySpec::parse(&refs)?)
            }
            "pbeta" => {
                let a = self.args()?;
                arity(self, &a, 2)?;
                Ok(length_cross_fraction(self.cfg, &Word::parse(&a[0])?, &a[1])?.underlying)
            }
            "wolpert" => {
                let a = self.args()?;
                arity(self, &a, 2)?;
                wolpert_rhs(self.cfg, &Word::parse(&a[0])?, &Word::parse(&a[1])?)
            }
            _ => {
                self.pos = at;
                Err(self.error(format!("unknown function `{}`", name)))
            }
        }
    }
}
