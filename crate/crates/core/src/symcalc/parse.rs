//! Expression syntax for polynomials and rationals.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := power (('*' | '/') power)*      // '/' only by a nonzero constant
//! power  := unary ('^' integer)?
//! unary  := '-' unary | '+' unary | atom
//! atom   := integer | variable | '(' expr ')'
//! ```

use std::str::FromStr;

use num::{BigInt, BigRational, Zero};

use super::poly::{Polynomial, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| Error::Parse(s.clone()))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{}`", c)));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_op(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            if self.eat_op('+') {
                acc = acc + self.term()?;
            } else if self.eat_op('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.power()?;
        loop {
            if self.eat_op('*') {
                acc = acc * self.power()?;
            } else if self.eat_op('/') {
                let d = self.power()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(Error::Parse("division by a non-constant or zero".into()));
                }
                let inv = BigRational::from_integer(1.into()) / d.constant_term();
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.unary()?;
        if self.eat_op('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n
                        .try_into()
                        .map_err(|_| Error::Parse("exponent too large".into()))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Parse("expected integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn unary(&mut self) -> Result<Polynomial> {
        if self.eat_op('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_op('+') {
            return self.unary();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Polynomial::constant(BigRational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Var::from_name(&name)
                    .map(Polynomial::var)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{}`", name)))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat_op(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(inner)
            }
            other => Err(Error::Parse(format!("unexpected token {:?}", other))),
        }
    }
}

pub fn parse_polynomial(src: &str) -> Result<Polynomial> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { toks, pos: 0 };
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(out)
}

/// Parse `p/q`, `-p/q` or an integer.
pub fn parse_rational(src: &str) -> Result<BigRational> {
    let s = src.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational `{}`", src)))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational `{}`", src)))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{}`", src)));
    }
    Ok(BigRational::new(n, d))
}

/// Canonical `p/q` rendering used at every serialization boundary.
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl FromStr for Polynomial {
    type Err = Error;
    fn from_str(s: &str) -> Result<Polynomial> {
        parse_polynomial(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::poly::rat;

    #[test]
    fn precedence_and_power() {
        let a = parse_polynomial("2*x^2 - -3").unwrap();
        let b = parse_polynomial("(x*x)*2 + 3").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn division_by_constant_only() {
        assert!(parse_polynomial("x/y").is_err());
        assert_eq!(
            parse_polynomial("x/2").unwrap(),
            parse_polynomial("x").unwrap().scale(&rat(1, 2))
        );
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("4").unwrap(), rat(4, 1));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&rat(2, 4)), "1/2");
        assert_eq!(format_rational(&rat(3, 1)), "3/1");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_polynomial("x +").is_err());
        assert!(parse_polynomial("w").is_err());
        assert!(parse_polynomial("(x").is_err());
    }
}
