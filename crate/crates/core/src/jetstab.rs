//! Infinitesimal (1,1)-stability of one-parameter unfoldings in the plane
//! `(t, x)`, decided in the finite quotient `E(t,x) / (m(t)^2 E(t,x) + m(t,x)^4)`.
//!
//! The quotient has basis `1, t, x, tx, x^2, tx^2, x^3`: monomials of
//! t-degree at most 1 and total degree at most 3. Every other monomial lies
//! in the ideal, so multiplying a generator by it contributes nothing and the
//! module generators only need the seven basis monomials as multipliers.

use std::fmt;
use std::str::FromStr;

use num::{BigRational, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rank, QMatrix};
use crate::symcalc::{format_rational, rat_int, Polynomial, Var};

/// `(t-degree, x-degree)` of the quotient basis, in order.
pub const QUOTIENT_BASIS: [(u16, u16); 7] =
    [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2), (0, 3)];
pub const QUOTIENT_NAMES: [&str; 7] = ["1", "t", "x", "tx", "x^2", "tx^2", "x^3"];
pub const QUOTIENT_DIM: usize = 7;

fn basis_monomial(i: usize) -> Polynomial {
    let (dt, dx) = QUOTIENT_BASIS[i];
    Polynomial::var(Var::T).pow(dt.into()) * Polynomial::var(Var::X).pow(dx.into())
}

/// Coordinates of `p` in the quotient. `p` may only involve `t` and `x`.
pub fn reduce(p: &Polynomial) -> Result<Vec<BigRational>> {
    let mut out = vec![BigRational::zero(); QUOTIENT_DIM];
    for (e, c) in p.terms() {
        for v in Var::ALL {
            if v != Var::T && v != Var::X && e[v.index()] != 0 {
                return Err(Error::Unsupported(format!(
                    "jet reduction of a germ involving {}",
                    v.name()
                )));
            }
        }
        let key = (e[Var::T.index()], e[Var::X.index()]);
        if let Some(i) = QUOTIENT_BASIS.iter().position(|&b| b == key) {
            out[i] += c;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `x^3 + (s + a t^2 + b t) x`
    Cubic,
    /// `x^4 + (s + a t^2 + b t) x^2 + t x`
    Quartic1,
    /// `x^4 + t x^2 + (s + a t^2 + b t) x`
    Quartic2,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Cubic, Family::Quartic1, Family::Quartic2];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cubic => "cubic",
            Family::Quartic1 => "quartic1",
            Family::Quartic2 => "quartic2",
        }
    }

    /// The unfolding `f(s, t, x)` at the given `a`, `b`.
    pub fn polynomial(self, a: &BigRational, b: &BigRational) -> Polynomial {
        let (s, t, x) = (
            Polynomial::var(Var::S),
            Polynomial::var(Var::T),
            Polynomial::var(Var::X),
        );
        let coeff = s + t.pow(2).scale(a) + t.scale(b);
        match self {
            Family::Cubic => x.pow(3) + coeff * x,
            Family::Quartic1 => x.pow(4) + coeff * x.pow(2) + t * x,
            Family::Quartic2 => x.pow(4) + t * x.pow(2) + coeff * x,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownId(s.to_string()))
    }
}

/// Spanning vectors of the extended tangent space, each tagged with the
/// generator it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentSpace {
    pub family: Family,
    pub vectors: Vec<(String, Vec<BigRational>)>,
    pub rank: usize,
}

impl TangentSpace {
    pub fn matrix(&self) -> QMatrix {
        self.vectors.iter().map(|(_, v)| v.clone()).collect()
    }

    /// Basis monomials completing the span, chosen greedily in basis order.
    pub fn missing_directions(&self) -> Vec<&'static str> {
        let mut m = self.matrix();
        let mut r = self.rank;
        let mut out = Vec::new();
        for (i, name) in QUOTIENT_NAMES.iter().enumerate() {
            let mut e = vec![BigRational::zero(); QUOTIENT_DIM];
            e[i] = rat_int(1);
            m.push(e);
            let r2 = rank(&m);
            if r2 > r {
                out.push(*name);
                r = r2;
            } else {
                m.pop();
            }
        }
        out
    }
}

pub fn tangent_space(family: Family, a: &BigRational, b: &BigRational) -> Result<TangentSpace> {
    let f = family.polynomial(a, b);
    let zero: crate::symcalc::Assignment = [(Var::S, BigRational::zero())].into();
    let f0 = f.substitute(&zero);
    let fx = f0.derivative(Var::X);
    let ft = f0.derivative(Var::T);
    let fs = f.derivative(Var::S).substitute(&zero);
    let t = Polynomial::var(Var::T);
    let mut vectors = Vec::new();
    for (i, name) in QUOTIENT_NAMES.iter().enumerate() {
        vectors.push((
            format!("f_x*{name}"),
            reduce(&(fx.clone() * basis_monomial(i)))?,
        ));
    }
    vectors.push(("f_t".to_string(), reduce(&ft)?));
    vectors.push(("f_t*t".to_string(), reduce(&(ft * t.clone()))?));
    vectors.push(("f_s".to_string(), reduce(&fs)?));
    vectors.push(("1".to_string(), reduce(&Polynomial::one())?));
    vectors.push(("t".to_string(), reduce(&t)?));
    vectors.push(("f".to_string(), reduce(&f0)?));
    vectors.push(("f*t".to_string(), reduce(&(f0 * t))?));
    let m: QMatrix = vectors.iter().map(|(_, v)| v.clone()).collect();
    let rank = rank(&m);
    Ok(TangentSpace {
        family,
        vectors,
        rank,
    })
}

pub fn is_11_stable(family: Family, a: &BigRational, b: &BigRational) -> Result<bool> {
    Ok(tangent_space(family, a, b)?.rank == QUOTIENT_DIM)
}

/// Normal forms of stable germs; each is accompanied by an indefinite
/// quadratic block `y^2 - z^2` in the remaining coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalForm {
    H0,
    H1,
    H2,
    H3,
}

impl NormalForm {
    pub fn name(self) -> &'static str {
        match self {
            NormalForm::H0 => "h0",
            NormalForm::H1 => "h1",
            NormalForm::H2 => "h2",
            NormalForm::H3 => "h3",
        }
    }

    pub fn expression(self) -> &'static str {
        match self {
            NormalForm::H0 => "x^3 + t*x",
            NormalForm::H1 => "x^3 + t^2*x + s*x",
            NormalForm::H2 => "x^3 - t^2*x + s*x",
            NormalForm::H3 => "x^4 + s*x^2 + t*x",
        }
    }

    /// The move realised by the unfolding, when there is one.
    pub fn role(self) -> &'static str {
        match self {
            NormalForm::H0 => "fold",
            NormalForm::H1 => "birth",
            NormalForm::H2 => "merging",
            NormalForm::H3 => "swallowtail",
        }
    }
}

pub const QUADRATIC_BLOCK: &str = "+y^2-z^2";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JetClass {
    Normal(NormalForm),
    NotStable,
}

impl fmt::Display for JetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JetClass::Normal(n) => f.write_str(n.name()),
            JetClass::NotStable => f.write_str("NotStable"),
        }
    }
}

/// Normal form by the coordinate changes of the case analysis: a nonzero
/// linear coefficient `b` absorbs the unfolding parameter into `t`; otherwise
/// the sign of `a` survives rescaling of `t`.
pub fn classify_family(family: Family, a: &BigRational, b: &BigRational) -> Result<JetClass> {
    let class = match family {
        Family::Cubic if !b.is_zero() => JetClass::Normal(NormalForm::H0),
        Family::Cubic if a.is_positive() => JetClass::Normal(NormalForm::H1),
        Family::Cubic if a.is_negative() => JetClass::Normal(NormalForm::H2),
        Family::Cubic => JetClass::NotStable,
        Family::Quartic1 => JetClass::Normal(NormalForm::H3),
        Family::Quartic2 if !b.is_zero() => JetClass::Normal(NormalForm::H3),
        Family::Quartic2 => JetClass::NotStable,
    };
    let stable = is_11_stable(family, a, b)?;
    if stable != (class != JetClass::NotStable) {
        return Err(Error::ModelInconsistency(format!(
            "{family} at a={a}, b={b}: rank test says stable={stable}, case analysis says {class}"
        )));
    }
    Ok(class)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JetReport {
    pub family: Family,
    pub a: String,
    pub b: String,
    pub rank: usize,
    pub stable: bool,
    pub class: JetClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normal_form: Option<String>,
    pub quadratic_block: String,
    pub missing: Vec<String>,
}

pub fn jet_report(family: Family, a: &BigRational, b: &BigRational) -> Result<JetReport> {
    let ts = tangent_space(family, a, b)?;
    let class = classify_family(family, a, b)?;
    Ok(JetReport {
        family,
        a: format_rational(a),
        b: format_rational(b),
        rank: ts.rank,
        stable: ts.rank == QUOTIENT_DIM,
        class,
        normal_form: match class {
            JetClass::Normal(n) => Some(n.expression().to_string()),
            JetClass::NotStable => None,
        },
        quadratic_block: QUADRATIC_BLOCK.to_string(),
        missing: ts
            .missing_directions()
            .into_iter()
            .map(String::from)
            .collect(),
    })
}

/// Reports for every family over the integer grid `[-n, n]^2`.
pub fn stability_grid(n: i64) -> Result<Vec<JetReport>> {
    let cells: Vec<(Family, i64, i64)> = Family::ALL
        .into_iter()
        .flat_map(|f| (-n..=n).flat_map(move |a| (-n..=n).map(move |b| (f, a, b))))
        .collect();
    cells
        .par_iter()
        .map(|&(f, a, b)| jet_report(f, &rat_int(a), &rat_int(b)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::{parse_polynomial, rat};

    fn q(n: i64) -> BigRational {
        rat_int(n)
    }

    #[test]
    fn reduction_drops_the_ideal() {
        let p = parse_polynomial("1 + 2*t + t^2 + x^4 + 3*t*x^2 - x^3 + t^2*x").unwrap();
        let v = reduce(&p).unwrap();
        let want: Vec<BigRational> = [1, 2, 0, 0, 0, 3, -1].iter().map(|&n| q(n)).collect();
        assert_eq!(v, want);
        for i in 0..QUOTIENT_DIM {
            let mut e = vec![q(0); QUOTIENT_DIM];
            e[i] = q(1);
            assert_eq!(reduce(&basis_monomial(i)).unwrap(), e);
        }
        assert!(reduce(&parse_polynomial("s*x").unwrap()).is_err());
    }

    #[test]
    fn cubic_at_origin_misses_tx() {
        // By hand: x^2, tx^2, x^3 from f_x; x from f_s; 1, t; f = x^3.
        let ts = tangent_space(Family::Cubic, &q(0), &q(0)).unwrap();
        assert_eq!(ts.rank, 6);
        assert_eq!(ts.missing_directions(), vec!["tx"]);
    }

    #[test]
    fn documented_ranks_and_verdicts() {
        assert_eq!(tangent_space(Family::Cubic, &q(0), &q(1)).unwrap().rank, 7);
        assert_eq!(
            tangent_space(Family::Quartic1, &q(0), &q(0)).unwrap().rank,
            7
        );
        assert!(!is_11_stable(Family::Cubic, &q(0), &q(0)).unwrap());
        assert!(!is_11_stable(Family::Quartic2, &q(5), &q(0)).unwrap());
        assert!(is_11_stable(Family::Quartic2, &q(0), &q(2)).unwrap());
    }

    #[test]
    fn classification_examples() {
        let c = |f, a, b| classify_family(f, &q(a), &q(b)).unwrap();
        assert_eq!(c(Family::Cubic, 0, 1), JetClass::Normal(NormalForm::H0));
        assert_eq!(c(Family::Cubic, 1, 0), JetClass::Normal(NormalForm::H1));
        assert_eq!(c(Family::Cubic, -1, 0), JetClass::Normal(NormalForm::H2));
        assert_eq!(c(Family::Cubic, 0, 0), JetClass::NotStable);
        assert_eq!(c(Family::Quartic2, 0, 1), JetClass::Normal(NormalForm::H3));
        assert_eq!(c(Family::Quartic2, 3, 0), JetClass::NotStable);
        assert_eq!(c(Family::Quartic1, 0, 0), JetClass::Normal(NormalForm::H3));
    }

    #[test]
    fn grid_matches_case_analysis() {
        let grid = stability_grid(3).unwrap();
        assert_eq!(grid.len(), 3 * 49);
        for r in &grid {
            let (a, b) = (r.a != "0/1", r.b != "0/1");
            let want = match r.family {
                Family::Cubic => a || b,
                Family::Quartic1 => true,
                Family::Quartic2 => b,
            };
            assert_eq!(r.stable, want, "{r:?}");
            assert_eq!(r.missing.is_empty(), r.stable);
        }
    }

    #[test]
    fn rational_parameters() {
        assert!(is_11_stable(Family::Cubic, &rat(1, 3), &q(0)).unwrap());
        assert!(!is_11_stable(Family::Quartic2, &rat(-7, 2), &q(0)).unwrap());
        let r = jet_report(Family::Cubic, &rat(-1, 2), &q(0)).unwrap();
        assert_eq!(r.a, "-1/2");
        assert_eq!(r.class, JetClass::Normal(NormalForm::H2));
    }

    #[test]
    fn family_names() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("quintic".parse::<Family>().is_err());
    }
}
