//! Differential forms on R^4 with polynomial coefficients.
//!
//! A basis k-form `dx_I` is stored as a bitmask over the coordinates
//! (bit 0 = t, bit 1 = x, bit 2 = y, bit 3 = z). The ordered basis of each
//! degree is the lexicographic order on sorted index lists, fixed once in
//! [`BASIS`]. All sign conventions in the crate derive from this table.

use std::fmt;

use num::{BigRational, One, Zero};

use super::poly::{Assignment, Polynomial, Var};
use crate::error::{Error, Result};

/// Bitmasks of the basis elements, degree by degree.
pub const BASIS: [&[u8]; 5] = [
    &[0b0000],
    &[0b0001, 0b0010, 0b0100, 0b1000],
    // tx, ty, tz, xy, xz, yz
    &[0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100],
    // txy, txz, tyz, xyz
    &[0b0111, 0b1011, 0b1101, 0b1110],
    &[0b1111],
];

/// Positions of the two-form coefficients in [`BASIS`].
pub const TX: usize = 0;
pub const TY: usize = 1;
pub const TZ: usize = 2;
pub const XY: usize = 3;
pub const XZ: usize = 4;
pub const YZ: usize = 5;

const COORD_NAMES: [char; 4] = ['t', 'x', 'y', 'z'];

pub fn basis_index(degree: usize, mask: u8) -> usize {
    BASIS[degree]
        .iter()
        .position(|&m| m == mask)
        .expect("mask belongs to the basis of its degree")
}

pub fn basis_name(mask: u8) -> String {
    if mask == 0 {
        return "1".into();
    }
    let names: Vec<String> = (0..4)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| format!("d{}", COORD_NAMES[i]))
        .collect();
    names.join("^")
}

/// Sign of moving every index of `a` past the smaller indices of `b`,
/// i.e. the sign in `dx_A ^ dx_B = sign * dx_{A u B}`.
fn merge_sign(a: u8, b: u8) -> i32 {
    let mut inversions = 0;
    for p in 0..4 {
        if a & (1 << p) == 0 {
            continue;
        }
        for q in 0..p {
            if b & (1 << q) != 0 {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Basis element named by a word over `t,x,y,z` such as `"zx"`.
/// Returns the degree, index and the sign relating it to the sorted basis.
pub fn parse_basis_word(word: &str) -> Result<(usize, usize, i32)> {
    let mut mask = 0u8;
    let mut sign = 1;
    for c in word.chars() {
        let i = COORD_NAMES
            .iter()
            .position(|&n| n == c)
            .ok_or_else(|| Error::Parse(format!("bad basis word `{}`", word)))?;
        let bit = 1u8 << i;
        if mask & bit != 0 {
            return Err(Error::Parse(format!("repeated factor in `{}`", word)));
        }
        // appending dx_i on the right: sign of moving it past larger indices
        sign *= merge_sign(mask, bit);
        mask |= bit;
    }
    let degree = mask.count_ones() as usize;
    Ok((degree, basis_index(degree, mask), sign))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Form {
    degree: usize,
    coeffs: Vec<Polynomial>,
}

pub type OneForm = Form;
pub type TwoForm = Form;
pub type ThreeForm = Form;
pub type FourForm = Form;

impl Form {
    pub fn zero(degree: usize) -> Result<Form> {
        if degree > 4 {
            return Err(Error::DegreeError(degree));
        }
        Ok(Form {
            degree,
            coeffs: vec![Polynomial::zero(); BASIS[degree].len()],
        })
    }

    pub fn new(degree: usize, coeffs: Vec<Polynomial>) -> Result<Form> {
        if degree > 4 {
            return Err(Error::DegreeError(degree));
        }
        if coeffs.len() != BASIS[degree].len() {
            return Err(Error::DimensionMismatch(coeffs.len(), BASIS[degree].len()));
        }
        Ok(Form { degree, coeffs })
    }

    pub fn scalar(p: Polynomial) -> Form {
        Form {
            degree: 0,
            coeffs: vec![p],
        }
    }

    /// Two-form from coefficients in basis order (tx, ty, tz, xy, xz, yz).
    pub fn two(c: [Polynomial; 6]) -> Form {
        Form {
            degree: 2,
            coeffs: c.into(),
        }
    }

    /// Build a form from `(basis word, coefficient)` pairs, e.g.
    /// `[("zx", p)]` for `p dz^dx`. Words may be unsorted.
    pub fn from_terms(degree: usize, terms: &[(&str, Polynomial)]) -> Result<Form> {
        let mut out = Form::zero(degree)?;
        for (word, p) in terms {
            let (d, i, sign) = parse_basis_word(word)?;
            if d != degree {
                return Err(Error::DimensionMismatch(d, degree));
            }
            let signed = if sign > 0 { p.clone() } else { -p };
            out.coeffs[i] = &out.coeffs[i] + &signed;
        }
        Ok(out)
    }

    /// Parse a two-form written as `tx: <expr>; zx: <expr>; ...`.
    pub fn parse_terms(degree: usize, src: &str) -> Result<Form> {
        let mut terms = Vec::new();
        for part in src.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (word, expr) = part
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `word: expr` in `{}`", part)))?;
            terms.push((word.trim().to_string(), expr.trim().parse::<Polynomial>()?));
        }
        let borrowed: Vec<(&str, Polynomial)> =
            terms.iter().map(|(w, p)| (w.as_str(), p.clone())).collect();
        Form::from_terms(degree, &borrowed)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Polynomial {
        &self.coeffs[i]
    }

    /// Coefficient of a named basis word, sign-adjusted (so `coeff_of("zx")`
    /// is minus the stored `xz` coefficient).
    pub fn coeff_of(&self, word: &str) -> Result<Polynomial> {
        let (d, i, sign) = parse_basis_word(word)?;
        if d != self.degree {
            return Err(Error::DimensionMismatch(d, self.degree));
        }
        Ok(if sign > 0 {
            self.coeffs[i].clone()
        } else {
            -&self.coeffs[i]
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Polynomial::is_zero)
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        if self.degree != other.degree {
            return Err(Error::DimensionMismatch(self.degree, other.degree));
        }
        Ok(Form {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.scale_poly(&Polynomial::int(-1)))
    }

    pub fn scale_poly(&self, p: &Polynomial) -> Form {
        Form {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * p).collect(),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Form {
        Form {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.scale(q)).collect(),
        }
    }

    pub fn substitute(&self, asg: &Assignment) -> Form {
        Form {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.substitute(asg)).collect(),
        }
    }

    pub fn eval(&self, asg: &Assignment) -> Result<Vec<BigRational>> {
        self.coeffs.iter().map(|c| c.eval(asg)).collect()
    }

    /// Partial derivative of every coefficient.
    pub fn coeff_derivative(&self, v: Var) -> Form {
        Form {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.derivative(v)).collect(),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, &mask) in self.coeffs.iter().zip(BASIS[self.degree]) {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({}) {}", c, basis_name(mask))?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Exterior derivative `d: Omega^k -> Omega^{k+1}`.
pub fn exterior_derivative(f: &Form) -> Result<Form> {
    let deg = f.degree + 1;
    let mut out = Form::zero(deg)?;
    for (c, &mask) in f.coeffs.iter().zip(BASIS[f.degree]) {
        if c.is_zero() {
            continue;
        }
        for (j, v) in Var::COORDS.iter().enumerate() {
            let bit = 1u8 << j;
            if mask & bit != 0 {
                continue;
            }
            let dc = c.derivative(*v);
            if dc.is_zero() {
                continue;
            }
            // d(c dx_I) = sum_j dc/dx_j dx_j ^ dx_I
            let sign = merge_sign(bit, mask);
            let i = basis_index(deg, mask | bit);
            let term = if sign > 0 { dc } else { -dc };
            out.coeffs[i] = &out.coeffs[i] + &term;
        }
    }
    Ok(out)
}

pub fn wedge(f: &Form, g: &Form) -> Result<Form> {
    let deg = f.degree + g.degree;
    let mut out = Form::zero(deg)?;
    for (a, &ma) in f.coeffs.iter().zip(BASIS[f.degree]) {
        if a.is_zero() {
            continue;
        }
        for (b, &mb) in g.coeffs.iter().zip(BASIS[g.degree]) {
            if b.is_zero() || ma & mb != 0 {
                continue;
            }
            let prod = a * b;
            let i = basis_index(deg, ma | mb);
            let term = if merge_sign(ma, mb) > 0 { prod } else { -prod };
            out.coeffs[i] = &out.coeffs[i] + &term;
        }
    }
    Ok(out)
}

/// Euclidean Hodge star for the orientation dt^dx^dy^dz:
/// `*(dx_I) = sign(I, I^c) dx_{I^c}`.
pub fn hodge_star(f: &Form) -> Form {
    let deg = 4 - f.degree;
    let mut out = Form::zero(deg).expect("degree <= 4");
    for (c, &mask) in f.coeffs.iter().zip(BASIS[f.degree]) {
        let comp = !mask & 0b1111;
        let i = basis_index(deg, comp);
        out.coeffs[i] = if merge_sign(mask, comp) > 0 {
            c.clone()
        } else {
            -c
        };
    }
    out
}

/// Rescale the `dt^dx + dy^dz` self-dual component by `factor`, keeping
/// the other two self-dual components and the anti-self-dual part.
pub fn rescale_eps_poly(f: &Form, factor: &Polynomial) -> Result<Form> {
    if f.degree != 2 {
        return Err(Error::DimensionMismatch(f.degree, 2));
    }
    let half = BigRational::new(1.into(), 2.into());
    let sd = (&f.coeffs[TX] + &f.coeffs[YZ]).scale(&half);
    let asd = (&f.coeffs[TX] - &f.coeffs[YZ]).scale(&half);
    let scaled = factor * &sd;
    let mut out = f.clone();
    out.coeffs[TX] = &scaled + &asd;
    out.coeffs[YZ] = &scaled - &asd;
    Ok(out)
}

pub fn rescale_eps(f: &Form, e: &BigRational) -> Result<Form> {
    rescale_eps_poly(f, &Polynomial::constant(e.clone()))
}

/// Coefficient of dt^dx^dy^dz in `f ^ f` for a two-form.
pub fn volume_coefficient(f: &Form) -> Result<Polynomial> {
    if f.degree != 2 {
        return Err(Error::DimensionMismatch(f.degree, 2));
    }
    Ok(wedge(f, f)?.coeffs[0].clone())
}

/// Numeric version of the square on already-evaluated coefficients.
pub fn volume_of_values(c: &[BigRational]) -> BigRational {
    let two = BigRational::one() + BigRational::one();
    two * (&c[TX] * &c[YZ] - &c[TY] * &c[XZ] + &c[TZ] * &c[XY])
}

pub fn is_zero_values(c: &[BigRational]) -> bool {
    c.iter().all(Zero::is_zero)
}
