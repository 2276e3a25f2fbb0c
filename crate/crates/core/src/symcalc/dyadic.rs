//! Exact evaluation at dyadic points using integer arithmetic only.
//!
//! A polynomial in the coordinates is rescaled once so that its value at
//! `n / 2^bits` is `numerator(n) / denominator` with a denominator shared by
//! every point. Signs and comparisons then need no rational normalization.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use super::poly::{Polynomial, Var};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DyadicPoly {
    terms: Vec<([u16; 4], BigInt)>,
    degree: u32,
    bits: u32,
    denominator: BigInt,
}

impl DyadicPoly {
    pub fn new(p: &Polynomial, bits: u32) -> Result<DyadicPoly> {
        if let Some(v) = p.variables().into_iter().find(|v| !v.is_coord()) {
            return Err(Error::UnboundVariable(v.name().to_string()));
        }
        let lcm = p
            .terms()
            .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let degree = p.total_degree();
        let terms = p
            .terms()
            .map(|(e, c)| {
                let coords = std::array::from_fn(|i| e[Var::COORDS[i].index()]);
                (coords, c.numer() * (&lcm / c.denom()))
            })
            .collect();
        let denominator = lcm << (bits * degree) as usize;
        Ok(DyadicPoly {
            terms,
            degree,
            bits,
            denominator,
        })
    }

    /// Positive common denominator of all values.
    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// Value times the common denominator at the point `n / 2^bits`.
    pub fn numerator(&self, n: &[i64; 4]) -> BigInt {
        let max = self.degree as usize;
        let powers: Vec<Vec<BigInt>> = n
            .iter()
            .map(|&v| {
                let b = BigInt::from(v);
                let mut out = Vec::with_capacity(max + 1);
                out.push(BigInt::one());
                for k in 1..=max {
                    let next = &out[k - 1] * &b;
                    out.push(next);
                }
                out
            })
            .collect();
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            let mut deg = 0u32;
            for i in 0..4 {
                if e[i] > 0 {
                    term *= &powers[i][e[i] as usize];
                    deg += e[i] as u32;
                }
            }
            acc += term << (self.bits * (self.degree - deg)) as usize;
        }
        acc
    }

    pub fn value(&self, n: &[i64; 4]) -> BigRational {
        BigRational::new(self.numerator(n), self.denominator.clone())
    }

    pub fn sign(&self, n: &[i64; 4]) -> i32 {
        let v = self.numerator(n);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }
}

/// Numerators of several polynomials over one shared positive denominator.
pub fn common_numerators(polys: &[DyadicPoly], n: &[i64; 4]) -> (Vec<BigInt>, BigInt) {
    let common = polys
        .iter()
        .fold(BigInt::one(), |acc, p| acc.lcm(&p.denominator));
    let nums = polys
        .iter()
        .map(|p| p.numerator(n) * (&common / &p.denominator))
        .collect();
    (nums, common)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::{coord_assignment, rat};

    #[test]
    fn agrees_with_rational_eval() {
        let p: Polynomial = "1/6*t^3*x - 2/3*y^2 + z - 5/4".parse().unwrap();
        let d = DyadicPoly::new(&p, 20).unwrap();
        let n = [3i64, -1048576, 77, -5];
        let pt = n.map(|v| rat(v, 1 << 20));
        assert_eq!(d.value(&n), p.eval(&coord_assignment(&pt)).unwrap());
    }

    #[test]
    fn shared_denominator() {
        let a = DyadicPoly::new(&"t/3".parse().unwrap(), 20).unwrap();
        let b = DyadicPoly::new(&"x^2/2".parse().unwrap(), 20).unwrap();
        let n = [1i64 << 19, 1 << 19, 0, 0];
        let (nums, den) = common_numerators(&[a.clone(), b.clone()], &n);
        assert_eq!(BigRational::new(nums[0].clone(), den.clone()), a.value(&n));
        assert_eq!(BigRational::new(nums[1].clone(), den), b.value(&n));
    }

    #[test]
    fn rejects_parameters() {
        let p: Polynomial = "s*x".parse().unwrap();
        assert!(DyadicPoly::new(&p, 20).is_err());
    }
}
