//! Catalog of local model maps R^4 -> R^2 and of the explicit two-forms
//! adapted to them.
//!
//! Model and form ids are stable strings shared with the CLI and reports.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, QMatrix};
use crate::symcalc::{
    coord_assignment, d, hodge_star, parse_rational, rat, rat_int, rescale_eps_poly, wedge,
    Assignment, Form, Polynomial, TwoForm, Var,
};

/// Parameter binding (only parameter variables).
pub type Params = BTreeMap<Var, BigRational>;

pub fn params_from_pairs(pairs: &[(&str, &str)]) -> Result<Params> {
    let mut out = Params::new();
    for (name, value) in pairs {
        let v = Var::from_name(name)
            .filter(|v| !v.is_coord())
            .ok_or_else(|| Error::UnknownId(name.to_string()))?;
        out.insert(v, parse_rational(value)?);
    }
    Ok(out)
}

fn poly(src: &str) -> Polynomial {
    src.parse().expect("catalog expression parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    Cusp,
    Birth,
    Merging,
    Flipping,
    Wrinkling,
    Lefschetz,
    Achiral,
    AchiralWrinkling,
}

impl ModelId {
    pub const ALL: [ModelId; 8] = [
        ModelId::Cusp,
        ModelId::Birth,
        ModelId::Merging,
        ModelId::Flipping,
        ModelId::Wrinkling,
        ModelId::Lefschetz,
        ModelId::Achiral,
        ModelId::AchiralWrinkling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelId::Cusp => "cusp",
            ModelId::Birth => "birth",
            ModelId::Merging => "merging",
            ModelId::Flipping => "flipping",
            ModelId::Wrinkling => "wrinkling",
            ModelId::Lefschetz => "lefschetz",
            ModelId::Achiral => "achiral",
            ModelId::AchiralWrinkling => "achiral_wrinkling",
        }
    }

    pub fn from_name(name: &str) -> Result<ModelId> {
        ModelId::ALL
            .iter()
            .copied()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::UnknownId(name.to_string()))
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chirality {
    Standard,
    Achiral,
}

/// Admissible interval for a parameter; `None` ends are unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamRange {
    pub var: Var,
    pub lo: Option<(BigRational, bool)>,
    pub hi: Option<(BigRational, bool)>,
}

impl ParamRange {
    fn any(var: Var) -> Self {
        ParamRange {
            var,
            lo: None,
            hi: None,
        }
    }

    fn at_least(var: Var, lo: BigRational) -> Self {
        ParamRange {
            var,
            lo: Some((lo, true)),
            hi: None,
        }
    }

    fn at_most(var: Var, hi: BigRational) -> Self {
        ParamRange {
            var,
            lo: None,
            hi: Some((hi, true)),
        }
    }

    fn eps() -> Self {
        ParamRange {
            var: Var::Eps,
            lo: Some((BigRational::zero(), false)),
            hi: Some((rat(1, 6), true)),
        }
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        let lo_ok = match &self.lo {
            None => true,
            Some((l, true)) => q >= l,
            Some((l, false)) => q > l,
        };
        let hi_ok = match &self.hi {
            None => true,
            Some((h, true)) => q <= h,
            Some((h, false)) => q < h,
        };
        lo_ok && hi_ok
    }

    pub fn describe(&self) -> String {
        let lo = match &self.lo {
            None => "(-inf".to_string(),
            Some((l, inc)) => format!("{}{}", if *inc { "[" } else { "(" }, l),
        };
        let hi = match &self.hi {
            None => "inf)".to_string(),
            Some((h, inc)) => format!("{}{}", h, if *inc { "]" } else { ")" }),
        };
        format!("{} in {}, {}", self.var, lo, hi)
    }
}

fn check_params(ranges: &[ParamRange], params: &Params) -> Result<()> {
    for (v, q) in params {
        let r = ranges
            .iter()
            .find(|r| r.var == *v)
            .ok_or_else(|| Error::ParamOutOfRange {
                name: v.name().into(),
                detail: "not a parameter of this entry".into(),
            })?;
        if !r.contains(q) {
            return Err(Error::ParamOutOfRange {
                name: v.name().into(),
                detail: format!("{} violates {}", q, r.describe()),
            });
        }
    }
    Ok(())
}

/// Closed-form description of the critical point set; every piece lies in
/// the plane y = z = 0 and is described through the (t, x) coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum CriticalSet {
    Empty,
    Origin,
    /// t = g(x), parametrized by x in [-1, 1].
    Graph {
        t_of_x: Polynomial,
    },
    /// Circle of squared radius `r2` centred at (ct, 0), traversed as
    /// t = ct + orient * r cos(theta), x = r sin(theta).
    Circle {
        ct: BigRational,
        r2: BigRational,
        orient: i32,
    },
    /// t^2 - x^2 = s with s != 0, via t = (m + s/m)/2, x = (s/m - m)/2.
    Hyperbola {
        s: BigRational,
    },
    /// t = x and t = -x.
    CrossedLines,
}

/// Exact square root of a nonnegative rational when it exists.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let dd = q.denom().sqrt();
    if &n * &n == *q.numer() && &dd * &dd == *q.denom() {
        Some(BigRational::new(n, dd))
    } else {
        None
    }
}

impl CriticalSet {
    /// Implicit equations in (t, x) (with y = z = 0 understood).
    pub fn equations(&self) -> Vec<Polynomial> {
        let t = Polynomial::var(Var::T);
        let x = Polynomial::var(Var::X);
        match self {
            CriticalSet::Empty => vec![Polynomial::one()],
            CriticalSet::Origin => vec![t, x],
            CriticalSet::Graph { t_of_x } => vec![&t - t_of_x],
            CriticalSet::Circle { ct, r2, .. } => {
                let shifted = &t - &Polynomial::constant(ct.clone());
                vec![&(&shifted * &shifted) + &(&x * &x) - Polynomial::constant(r2.clone())]
            }
            CriticalSet::Hyperbola { s } => {
                vec![&(&t * &t) - &(&x * &x) - Polynomial::constant(s.clone())]
            }
            CriticalSet::CrossedLines => vec![&(&t * &t) - &(&x * &x)],
        }
    }

    /// Number of connected curve pieces that can be sampled by a parameter.
    pub fn pieces(&self) -> usize {
        match self {
            CriticalSet::Empty => 0,
            CriticalSet::Origin => 1,
            CriticalSet::Graph { .. } | CriticalSet::Circle { .. } => 1,
            CriticalSet::Hyperbola { .. } | CriticalSet::CrossedLines => 2,
        }
    }

    pub fn is_closed_curve(&self) -> bool {
        matches!(self, CriticalSet::Circle { .. })
    }

    /// Exact point of piece `piece` for a rational curve parameter `m`.
    /// Circles use the stereographic parameter and need a rational radius.
    pub fn exact_point(&self, piece: usize, m: &BigRational) -> Option<[BigRational; 4]> {
        let z = BigRational::zero();
        let tx = match self {
            CriticalSet::Empty => return None,
            CriticalSet::Origin => (z.clone(), z.clone()),
            CriticalSet::Graph { t_of_x } => {
                let mut asg = Assignment::new();
                asg.insert(Var::X, m.clone());
                (t_of_x.eval(&asg).ok()?, m.clone())
            }
            CriticalSet::Circle { ct, r2, orient } => {
                let r = rational_sqrt(r2)?;
                let one = BigRational::one();
                let den = &one + m * m;
                let c = (&one - m * m) / &den;
                let s = (m + m) / &den;
                let sign = rat_int(*orient as i64);
                (ct + sign * &r * c, r * s)
            }
            CriticalSet::Hyperbola { s } => {
                if m.is_zero() {
                    return None;
                }
                let mm = if piece == 0 { m.abs() } else { -m.abs() };
                let half = rat(1, 2);
                ((&mm + s / &mm) * &half, (s / &mm - &mm) * half)
            }
            CriticalSet::CrossedLines => {
                let sign = if piece == 0 { rat_int(1) } else { rat_int(-1) };
                (m * sign, m.clone())
            }
        };
        Some([tx.0, tx.1, z.clone(), z])
    }

    /// Parameter domain of each piece for floating-point sampling.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            CriticalSet::Circle { .. } => (0.0, std::f64::consts::TAU),
            CriticalSet::Hyperbola { .. } => (-(3f64.ln()), 3f64.ln()),
            _ => (-1.0, 1.0),
        }
    }

    /// Floating-point point and derivative in the (t, x) plane.
    pub fn point_f64(&self, piece: usize, u: f64) -> ([f64; 2], [f64; 2]) {
        match self {
            CriticalSet::Empty | CriticalSet::Origin => ([0.0, 0.0], [0.0, 0.0]),
            CriticalSet::Graph { t_of_x } => {
                let mut vals = [0.0; 9];
                vals[Var::X.index()] = u;
                let t = t_of_x.eval_f64(&vals);
                let dt = t_of_x.derivative(Var::X).eval_f64(&vals);
                ([t, u], [dt, 1.0])
            }
            CriticalSet::Circle { ct, r2, orient } => {
                let r = crate::symcalc::rat_to_f64(r2).sqrt();
                let c = crate::symcalc::rat_to_f64(ct);
                let o = *orient as f64;
                (
                    [c + o * r * u.cos(), r * u.sin()],
                    [-o * r * u.sin(), r * u.cos()],
                )
            }
            CriticalSet::Hyperbola { s } => {
                let s = crate::symcalc::rat_to_f64(s);
                let sign = if piece == 0 { 1.0 } else { -1.0 };
                let m = sign * u.exp();
                let dm = m;
                (
                    [(m + s / m) / 2.0, (s / m - m) / 2.0],
                    [
                        (1.0 - s / (m * m)) * dm / 2.0,
                        (-s / (m * m) - 1.0) * dm / 2.0,
                    ],
                )
            }
            CriticalSet::CrossedLines => {
                let sign = if piece == 0 { 1.0 } else { -1.0 };
                ([sign * u, u], [sign, 1.0])
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedKind {
    Fold,
    Cusp,
    Lefschetz,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalModel {
    pub id: ModelId,
    pub params: Params,
    /// Components with parameters left symbolic.
    pub symbolic: [Polynomial; 2],
    /// Components with the bound parameters substituted.
    pub components: [Polynomial; 2],
    pub ranges: Vec<ParamRange>,
    pub critical_set: Option<CriticalSet>,
    /// Expected singularities as (kind, description of locus).
    pub inventory: Vec<(ExpectedKind, String)>,
    /// `Some` for rank-0 models; declared, never computed.
    pub chirality: Option<Chirality>,
    /// True when the first component is the coordinate t.
    pub product_form: bool,
}

fn wrinkling_pair(sign: i64) -> [Polynomial; 2] {
    [
        poly("t^2-x^2+y^2-z^2+s*t"),
        poly(&format!("{}*2*t*x+2*y*z", sign)),
    ]
}

pub fn get_model(id: ModelId, params: &Params) -> Result<LocalModel> {
    let s_any = vec![ParamRange::any(Var::S)];
    let s_nonneg = vec![ParamRange::at_least(Var::S, BigRational::zero())];
    let t = poly("t");
    let (symbolic, ranges, chirality, product_form) = match id {
        ModelId::Cusp => ([t, poly("x^3-3*x*t+y^2-z^2")], vec![], None, true),
        ModelId::Birth => ([t, poly("x^3+3*(t^2-s)*x+y^2-z^2")], s_any, None, true),
        ModelId::Merging => ([t, poly("x^3+3*(s-t^2)*x+y^2-z^2")], s_any, None, true),
        ModelId::Flipping => ([t, poly("x^4-x^2*s+x*t+y^2-z^2")], s_any, None, true),
        ModelId::Wrinkling => (
            wrinkling_pair(1),
            s_nonneg,
            Some(Chirality::Standard),
            false,
        ),
        ModelId::AchiralWrinkling => (
            wrinkling_pair(-1),
            s_nonneg,
            Some(Chirality::Achiral),
            false,
        ),
        ModelId::Lefschetz | ModelId::Achiral => {
            let sign = if id == ModelId::Lefschetz { 1 } else { -1 };
            let mut asg = Assignment::new();
            asg.insert(Var::S, BigRational::zero());
            let [f, g] = wrinkling_pair(sign);
            let ch = if sign > 0 {
                Chirality::Standard
            } else {
                Chirality::Achiral
            };
            ([f.substitute(&asg), g], vec![], Some(ch), false)
        }
    };
    check_params(&ranges, params)?;
    let asg: Assignment = params.clone();
    let components = [symbolic[0].substitute(&asg), symbolic[1].substitute(&asg)];
    let s = params.get(&Var::S).cloned();
    let critical_set = critical_set_of(id, s.as_ref());
    let inventory = inventory_of(id, s.as_ref());
    Ok(LocalModel {
        id,
        params: params.clone(),
        symbolic,
        components,
        ranges,
        critical_set,
        inventory,
        chirality,
        product_form,
    })
}

fn critical_set_of(id: ModelId, s: Option<&BigRational>) -> Option<CriticalSet> {
    let sx = |s: &BigRational| Polynomial::var(Var::X).scale(&(s + s));
    Some(match id {
        ModelId::Cusp => CriticalSet::Graph {
            t_of_x: poly("x^2"),
        },
        ModelId::Lefschetz | ModelId::Achiral => CriticalSet::Origin,
        ModelId::Birth => {
            let s = s?;
            if s.is_negative() {
                CriticalSet::Empty
            } else if s.is_zero() {
                CriticalSet::Origin
            } else {
                CriticalSet::Circle {
                    ct: BigRational::zero(),
                    r2: s.clone(),
                    orient: 1,
                }
            }
        }
        ModelId::Merging => {
            let s = s?;
            if s.is_zero() {
                CriticalSet::CrossedLines
            } else {
                CriticalSet::Hyperbola { s: s.clone() }
            }
        }
        ModelId::Flipping => {
            let s = s?;
            CriticalSet::Graph {
                t_of_x: &sx(s) - &poly("4*x^3"),
            }
        }
        ModelId::Wrinkling | ModelId::AchiralWrinkling => {
            let s = s?;
            if s.is_zero() {
                CriticalSet::Origin
            } else {
                let q = s * rat(1, 4);
                CriticalSet::Circle {
                    ct: -q.clone(),
                    r2: &q * &q,
                    orient: -1,
                }
            }
        }
    })
}

fn inventory_of(id: ModelId, s: Option<&BigRational>) -> Vec<(ExpectedKind, String)> {
    use ExpectedKind::*;
    let positive = s.map(|s| s.is_positive()).unwrap_or(false);
    let zero = s.map(|s| s.is_zero()).unwrap_or(false);
    match id {
        ModelId::Cusp => vec![(Cusp, "origin".into()), (Fold, "t = x^2, x != 0".into())],
        ModelId::Birth if positive => vec![
            (Cusp, "t = +-sqrt(s), x = 0".into()),
            (Fold, "rest of circle x^2 + t^2 = s".into()),
        ],
        ModelId::Birth if zero => vec![(Degenerate, "origin".into())],
        ModelId::Birth => vec![],
        ModelId::Merging if positive => vec![
            (Cusp, "t = +-sqrt(s), x = 0".into()),
            (Fold, "rest of t^2 - x^2 = s".into()),
        ],
        ModelId::Merging if zero => vec![(Degenerate, "origin".into())],
        ModelId::Merging => vec![(Fold, "t^2 - x^2 = s".into())],
        ModelId::Flipping if positive => vec![
            (Cusp, "x = +-sqrt(s/6)".into()),
            (Fold, "rest of t = 2sx - 4x^3".into()),
        ],
        ModelId::Flipping if zero => vec![(Degenerate, "origin".into())],
        ModelId::Flipping => vec![(Fold, "t = 2sx - 4x^3".into())],
        ModelId::Wrinkling | ModelId::AchiralWrinkling if positive => vec![
            (Cusp, "theta in {pi/3, pi, 5pi/3}".into()),
            (Fold, "rest of x^2 + t^2 + st/2 = 0".into()),
        ],
        _ => vec![(Lefschetz, "origin".into())],
    }
}

impl LocalModel {
    /// Exact 2x4 Jacobian at a rational point; all parameters must be bound.
    pub fn jacobian(&self, point: &[BigRational; 4]) -> Result<QMatrix> {
        let asg = coord_assignment(point);
        self.components
            .iter()
            .map(|c| {
                Var::COORDS
                    .iter()
                    .map(|v| c.derivative(*v).eval(&asg))
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    }

    pub fn jacobian_rank(&self, point: &[BigRational; 4]) -> Result<usize> {
        Ok(linalg::rank(&self.jacobian(point)?))
    }

    pub fn eval(&self, point: &[BigRational; 4]) -> Result<[BigRational; 2]> {
        let asg = coord_assignment(point);
        Ok([
            self.components[0].eval(&asg)?,
            self.components[1].eval(&asg)?,
        ])
    }

    pub fn eval_f64(&self, p: &[f64; 4]) -> [f64; 2] {
        [
            self.components[0].eval_coords_f64(p),
            self.components[1].eval_coords_f64(p),
        ]
    }

    /// Floating-point Jacobian at `p`.
    pub fn jacobian_f64(&self, p: &[f64; 4]) -> [[f64; 4]; 2] {
        let mut out = [[0.0; 4]; 2];
        for (i, c) in self.components.iter().enumerate() {
            for (j, v) in Var::COORDS.iter().enumerate() {
                out[i][j] = c.derivative(*v).eval_coords_f64(p);
            }
        }
        out
    }

    /// `dF1 ^ dF2` as a two-form.
    pub fn pullback_area(&self) -> TwoForm {
        wedge(&d(&self.components[0]), &d(&self.components[1])).expect("1+1 <= 4")
    }
}

/// The explicit two-forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FormId {
    #[serde(rename = "LS")]
    Ls,
    #[serde(rename = "cusp_eps")]
    CuspEps,
    #[serde(rename = "eq1_birth")]
    Eq1Birth,
    #[serde(rename = "eq2_merging")]
    Eq2Merging,
    #[serde(rename = "eq3_flipping")]
    Eq3Flipping,
    #[serde(rename = "sigma_wrinkling")]
    SigmaWrinkling,
    #[serde(rename = "omega_wrinkling")]
    OmegaWrinkling,
}

impl FormId {
    pub const ALL: [FormId; 7] = [
        FormId::Ls,
        FormId::CuspEps,
        FormId::Eq1Birth,
        FormId::Eq2Merging,
        FormId::Eq3Flipping,
        FormId::SigmaWrinkling,
        FormId::OmegaWrinkling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormId::Ls => "LS",
            FormId::CuspEps => "cusp_eps",
            FormId::Eq1Birth => "eq1_birth",
            FormId::Eq2Merging => "eq2_merging",
            FormId::Eq3Flipping => "eq3_flipping",
            FormId::SigmaWrinkling => "sigma_wrinkling",
            FormId::OmegaWrinkling => "omega_wrinkling",
        }
    }

    pub fn from_name(name: &str) -> Result<FormId> {
        FormId::ALL
            .iter()
            .copied()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::UnknownId(name.to_string()))
    }
}

impl fmt::Display for FormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Closed,
    NonnegSquare,
    Transverse,
    FiberPositive(ModelId),
    Equals(FormId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormEntry {
    pub id: FormId,
    /// Form with parameters left symbolic.
    pub symbolic: TwoForm,
    pub params: Params,
    pub ranges: Vec<ParamRange>,
    pub claims: Vec<Claim>,
    /// Model whose critical set is the zero set and whose fibres the form
    /// should be positive on.
    pub model: ModelId,
}

impl FormEntry {
    /// Form with the entry's parameters substituted.
    pub fn form(&self) -> TwoForm {
        self.symbolic.substitute(&self.params)
    }

    pub fn with_params(&self, params: &Params) -> Result<FormEntry> {
        let mut merged = self.params.clone();
        merged.extend(params.iter().map(|(k, v)| (*k, v.clone())));
        check_params(&self.ranges, &merged)?;
        Ok(FormEntry {
            params: merged,
            ..self.clone()
        })
    }

    /// Model parameters: those of the form restricted to `s`.
    pub fn model_params(&self) -> Params {
        self.params
            .iter()
            .filter(|(v, _)| **v == Var::S)
            .map(|(v, q)| (*v, q.clone()))
            .collect()
    }

    pub fn linked_model(&self) -> Result<LocalModel> {
        get_model(self.model, &self.model_params())
    }
}

/// `dt ^ df` for a scalar function f.
pub fn dt_wedge_df(f: &Polynomial) -> TwoForm {
    wedge(&d(&Polynomial::var(Var::T)), &d(f)).expect("1+1 <= 4")
}

/// `R_eps(dt^df + *(dt^df))` with eps symbolic.
pub fn rescaled_self_dual(f: &Polynomial) -> TwoForm {
    let base = dt_wedge_df(f);
    let sd = base.add(&hodge_star(&base)).expect("same degree");
    rescale_eps_poly(&sd, &Polynomial::var(Var::Eps)).expect("two-form")
}

fn two(src: &str) -> TwoForm {
    Form::parse_terms(2, src).expect("catalog form parses")
}

fn symbolic_form(id: FormId) -> TwoForm {
    match id {
        FormId::Ls => two("tx: 3*eps*(x^2+t^2-s); yz: 3*eps*(x^2+t^2-s);
             tz: 6*eps*y*t - 2*z; xz: 6*eps*y*x;
             xy: -2*z; ty: 2*y; zx: 2*y"),
        FormId::CuspEps => rescaled_self_dual(&poly("x^3-3*x*t+y^2-z^2"))
            .sub(&two("tz: 3*eps*y; zx: 6*eps*x*y"))
            .expect("two-forms"),
        FormId::Eq1Birth => rescaled_self_dual(&poly("x^3+3*(t^2-s)*x+y^2-z^2"))
            .add(&two("tz: 6*eps*y*t; xz: 6*eps*y*x"))
            .expect("two-forms"),
        FormId::Eq2Merging => rescaled_self_dual(&poly("x^3+3*(s-t^2)*x+y^2-z^2"))
            .sub(&two("tz: 6*eps*y*t; zx: 6*eps*y*x"))
            .expect("two-forms"),
        FormId::Eq3Flipping => two("tx: 4*x^3-2*x*s+t; yz: 4*x^3-2*x*s+t;
             ty: 2*y-2*z; zx: (12*x^2-2*s+2)*y;
             tz: -(2*z+y); xy: -(12*x^2-2*s+1)*2*z"),
        FormId::SigmaWrinkling => two("yz: (2*t+s)*2*t+4*x^2; tx: 4*y^2+4*z^2;
             zx: 2*((2*t+s)*2*z-4*x*y); ty: 2*(4*x*y-4*t*z-s*z)"),
        FormId::OmegaWrinkling => {
            let m = get_model(ModelId::Wrinkling, &Params::new()).expect("symbolic model");
            m.pullback_area()
                .scale_poly(&Polynomial::var(Var::K))
                .add(&symbolic_form(FormId::SigmaWrinkling))
                .expect("two-forms")
        }
    }
}

pub fn get_form(id: FormId, params: &Params) -> Result<FormEntry> {
    use Claim::*;
    let s_any = ParamRange::any(Var::S);
    let s_nonneg = ParamRange::at_least(Var::S, BigRational::zero());
    let (ranges, claims, model) = match id {
        FormId::Ls => (
            vec![ParamRange::eps(), s_any],
            vec![
                Closed,
                NonnegSquare,
                Transverse,
                FiberPositive(ModelId::Birth),
            ],
            ModelId::Birth,
        ),
        FormId::CuspEps => (
            vec![ParamRange::eps()],
            vec![
                Closed,
                NonnegSquare,
                Transverse,
                FiberPositive(ModelId::Cusp),
            ],
            ModelId::Cusp,
        ),
        FormId::Eq1Birth => (
            vec![ParamRange::eps(), s_any],
            vec![
                Closed,
                Equals(FormId::Ls),
                NonnegSquare,
                FiberPositive(ModelId::Birth),
            ],
            ModelId::Birth,
        ),
        FormId::Eq2Merging => (
            vec![ParamRange::eps(), s_any],
            vec![Closed, NonnegSquare, FiberPositive(ModelId::Merging)],
            ModelId::Merging,
        ),
        FormId::Eq3Flipping => (
            vec![ParamRange::at_most(Var::S, rat(1, 3))],
            vec![Closed, NonnegSquare, FiberPositive(ModelId::Flipping)],
            ModelId::Flipping,
        ),
        FormId::SigmaWrinkling => (
            vec![s_nonneg],
            vec![Closed, FiberPositive(ModelId::Wrinkling)],
            ModelId::Wrinkling,
        ),
        FormId::OmegaWrinkling => (
            vec![s_nonneg, ParamRange::at_least(Var::K, BigRational::zero())],
            vec![Closed, NonnegSquare, FiberPositive(ModelId::Wrinkling)],
            ModelId::Wrinkling,
        ),
    };
    check_params(&ranges, params)?;
    Ok(FormEntry {
        id,
        symbolic: symbolic_form(id),
        params: params.clone(),
        ranges,
        claims,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcalc::forms::{TX, XZ};

    fn params(pairs: &[(&str, &str)]) -> Params {
        params_from_pairs(pairs).unwrap()
    }

    fn origin() -> [BigRational; 4] {
        std::array::from_fn(|_| BigRational::zero())
    }

    #[test]
    fn birth_component() {
        let m = get_model(ModelId::Birth, &params(&[("s", "1")])).unwrap();
        assert_eq!(m.components[1], poly("x^3+3*(t^2-1)*x+y^2-z^2"));
    }

    #[test]
    fn wrinkling_at_zero_is_lefschetz() {
        let w = get_model(ModelId::Wrinkling, &params(&[("s", "0")])).unwrap();
        let l = get_model(ModelId::Lefschetz, &Params::new()).unwrap();
        assert_eq!(w.components, l.components);
    }

    #[test]
    fn cusp_critical_set() {
        let m = get_model(ModelId::Cusp, &Params::new()).unwrap();
        assert_eq!(m.critical_set.unwrap().equations(), vec![poly("t-x^2")]);
    }

    #[test]
    fn jacobian_ranks() {
        let cusp = get_model(ModelId::Cusp, &Params::new()).unwrap();
        let j = cusp.jacobian(&origin()).unwrap();
        assert_eq!(j[0], vec![rat_int(1), rat_int(0), rat_int(0), rat_int(0)]);
        assert!(j[1].iter().all(Zero::is_zero));
        // d/dt of the first component is 2t + s = 1 at the origin
        let w = get_model(ModelId::Wrinkling, &params(&[("s", "1")])).unwrap();
        assert_eq!(w.jacobian_rank(&origin()).unwrap(), 1);
        let b = get_model(ModelId::Birth, &params(&[("s", "1")])).unwrap();
        let p = [rat_int(0), rat_int(2), rat_int(0), rat_int(0)];
        assert_eq!(b.jacobian(&p).unwrap()[1][1], rat_int(9));
        assert_eq!(b.jacobian_rank(&p).unwrap(), 2);
    }

    #[test]
    fn unbound_parameter_in_jacobian() {
        let b = get_model(ModelId::Birth, &Params::new()).unwrap();
        assert_eq!(
            b.jacobian(&origin()),
            Err(Error::UnboundVariable("s".into()))
        );
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(matches!(
            get_model(ModelId::Wrinkling, &params(&[("s", "-1")])),
            Err(Error::ParamOutOfRange { .. })
        ));
        assert!(matches!(
            get_form(FormId::Ls, &params(&[("eps", "1/5")])),
            Err(Error::ParamOutOfRange { .. })
        ));
        assert!(matches!(
            get_form(FormId::Eq3Flipping, &params(&[("s", "1/2")])),
            Err(Error::ParamOutOfRange { .. })
        ));
        assert!(ModelId::from_name("nope").is_err());
        assert!(FormId::from_name("LS").is_ok());
    }

    #[test]
    fn printed_coefficients() {
        let ls = get_form(FormId::Ls, &Params::new()).unwrap();
        assert_eq!(ls.symbolic.coeff(TX), &poly("3*eps*(x^2+t^2-s)"));
        let eq3 = get_form(FormId::Eq3Flipping, &Params::new()).unwrap();
        assert_eq!(
            eq3.symbolic.coeff_of("zx").unwrap(),
            poly("(12*x^2-2*s+2)*y")
        );
        assert_eq!(eq3.symbolic.coeff(XZ), &poly("-(12*x^2-2*s+2)*y"));
    }

    #[test]
    fn cusp_eps_matches_expanded_display() {
        let f = get_form(FormId::CuspEps, &Params::new()).unwrap();
        let expanded = two("tx: 3*eps*(x^2-t); yz: 3*eps*(x^2-t);
             ty: 2*y; zx: 2*y-6*eps*x*y;
             tz: -(2*z+3*eps*y); xy: -2*z");
        assert_eq!(f.symbolic, expanded);
    }

    #[test]
    fn eq1_equals_ls() {
        let a = get_form(FormId::Eq1Birth, &Params::new()).unwrap();
        let b = get_form(FormId::Ls, &Params::new()).unwrap();
        assert_eq!(a.symbolic, b.symbolic);
    }

    #[test]
    fn exact_locus_points() {
        let w = get_model(ModelId::Wrinkling, &params(&[("s", "1")])).unwrap();
        let cs = w.critical_set.clone().unwrap();
        // m = 0 is theta = 0: (t, x) = (-1/2, 0)
        let p = cs.exact_point(0, &BigRational::zero()).unwrap();
        assert_eq!(p[0], rat(-1, 2));
        let h = CriticalSet::Hyperbola { s: rat_int(1) };
        let q = h.exact_point(1, &rat(1, 2)).unwrap();
        assert_eq!(&q[0] * &q[0] - &q[1] * &q[1], rat_int(1));
        assert!(q[0].is_negative());
    }

    #[test]
    fn sqrt_of_rationals() {
        assert_eq!(rational_sqrt(&rat(1, 4)), Some(rat(1, 2)));
        assert_eq!(rational_sqrt(&rat(1, 2)), None);
        assert_eq!(rational_sqrt(&rat(-1, 4)), None);
    }
}
