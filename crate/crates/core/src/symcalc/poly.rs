//! Exact multivariate polynomials over the rationals.
//!
//! Every polynomial lives in the same nine-variable ring: the four
//! coordinates `t, x, y, z` and the parameters `s, eps, k, a, b`.
//! Terms are kept in a `BTreeMap` so iteration order (and therefore
//! printing and hashing of reports) is deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub const NVARS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    X,
    Y,
    Z,
    S,
    Eps,
    K,
    A,
    B,
}

impl Var {
    pub const ALL: [Var; NVARS] = [
        Var::T,
        Var::X,
        Var::Y,
        Var::Z,
        Var::S,
        Var::Eps,
        Var::K,
        Var::A,
        Var::B,
    ];
    /// The four coordinates of R^4 in basis order.
    pub const COORDS: [Var; 4] = [Var::T, Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
            Var::S => "s",
            Var::Eps => "eps",
            Var::K => "k",
            Var::A => "a",
            Var::B => "b",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Var::ALL.iter().copied().find(|v| v.name() == name)
    }

    pub fn is_coord(self) -> bool {
        self.index() < 4
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type Exponent = [u16; NVARS];

/// Variable binding used by evaluation and substitution.
pub type Assignment = BTreeMap<Var, BigRational>;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Binding of the four coordinates.
pub fn coord_assignment(p: &[BigRational; 4]) -> Assignment {
    Var::COORDS
        .iter()
        .zip(p.iter())
        .map(|(v, q)| (*v, q.clone()))
        .collect()
}

pub fn rat_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Polynomial {
    terms: BTreeMap<Exponent, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Polynomial::monomial([0; NVARS], c)
    }

    pub fn int(n: i64) -> Self {
        Polynomial::constant(rat_int(n))
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NVARS];
        e[v.index()] = 1;
        Polynomial::monomial(e, BigRational::one())
    }

    pub fn monomial(e: Exponent, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Polynomial { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &Exponent) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| d as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.keys().map(|e| e[v.index()]).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for e in self.terms.keys() {
            for v in Var::ALL {
                if e[v.index()] > 0 {
                    out.insert(v);
                }
            }
        }
        out
    }

    fn add_term(&mut self, e: Exponent, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(e, q)| (*e, q * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    pub fn derivative(&self, v: Var) -> Polynomial {
        let i = v.index();
        let mut out = Polynomial::zero();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[i] -= 1;
            out.add_term(e2, c * BigRational::from_integer(BigInt::from(e[i])));
        }
        out
    }

    /// Full evaluation; every variable occurring in `self` must be bound.
    pub fn eval(&self, asg: &Assignment) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for v in Var::ALL {
                let d = e[v.index()];
                if d == 0 {
                    continue;
                }
                let val = asg
                    .get(&v)
                    .ok_or_else(|| Error::UnboundVariable(v.name().to_string()))?;
                term *= num::pow::pow(val.clone(), d as usize);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Partial substitution: bound variables are replaced by their values,
    /// the rest stay symbolic.
    pub fn substitute(&self, asg: &Assignment) -> Polynomial {
        let mut out = Polynomial::zero();
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let mut coef = c.clone();
            for (v, val) in asg {
                let d = e2[v.index()];
                if d > 0 {
                    coef *= num::pow::pow(val.clone(), d as usize);
                    e2[v.index()] = 0;
                }
            }
            out.add_term(e2, coef);
        }
        out
    }

    /// Replace variable `v` by a polynomial.
    pub fn compose(&self, v: Var, with: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        let powers: Vec<Polynomial> = {
            let top = self.degree_in(v) as u32;
            let mut p = vec![Polynomial::one()];
            for i in 1..=top {
                let next = &p[(i - 1) as usize] * with;
                p.push(next);
            }
            p
        };
        for (e, c) in &self.terms {
            let mut e2 = *e;
            let d = e2[v.index()] as usize;
            e2[v.index()] = 0;
            let rest = Polynomial::monomial(e2, c.clone());
            out = out + &rest * &powers[d];
        }
        out
    }

    /// Floating-point evaluation with values indexed by `Var::index`.
    pub fn eval_f64(&self, vals: &[f64; NVARS]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut term = rat_to_f64(c);
            for (i, &d) in e.iter().enumerate() {
                if d > 0 {
                    term *= vals[i].powi(d as i32);
                }
            }
            acc += term;
        }
        acc
    }

    pub fn eval_coords_f64(&self, p: &[f64; 4]) -> f64 {
        let mut vals = [0.0; NVARS];
        vals[..4].copy_from_slice(p);
        self.eval_f64(&vals)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d == 0))
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeff(&[0; NVARS])
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest total degree first reads more naturally.
        let mut keys: Vec<&Exponent> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let da: u32 = a.iter().map(|&d| d as u32).sum();
            let db: u32 = b.iter().map(|&d| d as u32).sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (n, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let vars: Vec<String> = Var::ALL
                .iter()
                .filter(|v| e[v.index()] > 0)
                .map(|v| match e[v.index()] {
                    1 => v.name().to_string(),
                    d => format!("{}^{}", v.name(), d),
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", mag)?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", mag)?;
                }
                f.write_str(&vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for i in 0..NVARS {
                    e[i] += eb[i];
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-BigRational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        s.parse().unwrap()
    }

    #[test]
    fn birth_circle_point_evaluates_to_zero() {
        let mut asg = Assignment::new();
        asg.insert(Var::T, rat_int(1));
        asg.insert(Var::X, rat_int(0));
        asg.insert(Var::S, rat_int(1));
        assert!(p("x^2+t^2-s").eval(&asg).unwrap().is_zero());
    }

    #[test]
    fn flipping_slope_value() {
        let mut asg = Assignment::new();
        asg.insert(Var::T, rat_int(0));
        asg.insert(Var::X, rat_int(1));
        asg.insert(Var::S, rat(1, 3));
        // 4 - 2/3 + 0
        assert_eq!(p("4*x^3-2*x*s+t").eval(&asg).unwrap(), rat(10, 3));
    }

    #[test]
    fn eps_coefficient_vanishes_at_origin() {
        let mut asg = Assignment::new();
        asg.insert(Var::T, rat_int(0));
        asg.insert(Var::X, rat_int(0));
        asg.insert(Var::Eps, rat(1, 6));
        assert!(p("3*eps*(x^2-t)").eval(&asg).unwrap().is_zero());
    }

    #[test]
    fn missing_variable_is_reported() {
        let asg = Assignment::new();
        assert_eq!(p("2*x").eval(&asg), Err(Error::UnboundVariable("x".into())));
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let a = p("x^2+3*y");
        let b = p("x^2");
        let d = &a - &b;
        assert_eq!(d.num_terms(), 1);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn derivative_and_compose() {
        assert_eq!(p("x^3-3*x*t").derivative(Var::X), p("3*x^2-3*t"));
        assert_eq!(p("x^2").compose(Var::X, &p("t+1")), p("t^2+2*t+1"));
    }

    #[test]
    fn display_round_trips() {
        let q = p("3*eps*x^2 - 1/2*t*y + 7");
        let back: Polynomial = q.to_string().parse().unwrap();
        assert_eq!(q, back);
    }
}
