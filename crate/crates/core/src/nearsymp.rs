//! Checks that a two-form is near-symplectic and adapted to a local model:
//! closedness, non-negative square, transversality of the zero set,
//! positivity on fibres, the normal quadratic form and circle parity.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, SymmetricEigen};
use num::{BigInt, BigRational, FromPrimitive, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{
    get_form, get_model, Claim, CriticalSet, FormEntry, FormId, LocalModel, Params,
};
use crate::sampling;
use crate::singular::{exact_locus_samples, LocusDistance};
use crate::symcalc::forms::{basis_index, BASIS};
use crate::symcalc::{
    common_numerators, coord_assignment, exterior_derivative, format_rational, rat_to_f64,
    volume_coefficient, DyadicPoly, Polynomial, ThreeForm, TwoForm, Var,
};
use crate::tolerances::{LOCUS_SAMPLES, RANK_SV, SYMMETRY, TRANSPORT_OVERLAP, ZERO_SET};

/// Number of locus samples on which the square must vanish exactly.
pub const SQUARE_LOCUS_SAMPLES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub margin: f64,
    /// Coordinates (t, x, y, z) of the extremal or failing sample.
    pub witness: Vec<String>,
}

impl CheckResult {
    pub fn new(name: &str, ok: bool, margin: f64, witness: Vec<String>) -> CheckResult {
        CheckResult {
            name: name.to_string(),
            status: Status::from_bool(ok),
            margin: if margin.is_finite() { margin } else { 0.0 },
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingInfo {
    pub seed: u64,
    pub count: usize,
    pub radius: String,
    pub delta: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub form: String,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<CheckResult>,
    pub sampling: SamplingInfo,
}

impl VerificationReport {
    pub fn new(entry: &FormEntry, seed: u64, count: usize, delta: &BigRational) -> Self {
        VerificationReport {
            form: entry.id.name().to_string(),
            params: entry
                .params
                .iter()
                .map(|(v, q)| (v.name().to_string(), format_rational(q)))
                .collect(),
            checks: Vec::new(),
            sampling: SamplingInfo {
                seed,
                count,
                radius: "1/1".into(),
                delta: format_rational(delta),
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status.passed())
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn absorb(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }
}

pub fn witness_exact(p: &[BigRational; 4]) -> Vec<String> {
    p.iter().map(format_rational).collect()
}

pub fn witness_dyadic(n: &[i64; 4]) -> Vec<String> {
    n.iter()
        .map(|&v| {
            format_rational(&BigRational::new(
                BigInt::from(v),
                BigInt::from(1i64 << sampling::DYADIC_BITS),
            ))
        })
        .collect()
}

fn dyadic_f64(n: &[i64; 4]) -> [f64; 4] {
    let scale = (1i64 << sampling::DYADIC_BITS) as f64;
    n.map(|v| v as f64 / scale)
}

pub fn witness_f64(p: &[f64; 4]) -> Vec<String> {
    p.iter()
        .map(|v| BigRational::from_f64(*v).map_or_else(|| "nan".into(), |q| format_rational(&q)))
        .collect()
}

/// The entry's form with every parameter bound.
fn bound_form(entry: &FormEntry) -> Result<TwoForm> {
    let form = entry.form();
    for c in form.coeffs() {
        if let Some(v) = c.variables().into_iter().find(|v| !v.is_coord()) {
            return Err(Error::UnboundVariable(v.name().to_string()));
        }
    }
    Ok(form)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedResult {
    pub pass: bool,
    pub residual: ThreeForm,
}

pub fn verify_closed(form: &TwoForm) -> ClosedResult {
    let residual = exterior_derivative(form).expect("two-form");
    ClosedResult {
        pass: residual.is_zero(),
        residual,
    }
}

pub fn closed_check(form: &TwoForm) -> CheckResult {
    let r = verify_closed(form);
    let terms: usize = r.residual.coeffs().iter().map(|c| c.num_terms()).sum();
    CheckResult::new("closed", r.pass, terms as f64, Vec::new())
}

fn eval_exact(polys: &[Polynomial], p: &[BigRational; 4]) -> Vec<BigRational> {
    let asg = coord_assignment(p);
    polys
        .iter()
        .map(|c| c.eval(&asg).expect("coordinates bound"))
        .collect()
}

/// Index of the smallest value; ties go to the earliest sample.
fn argmin<T: PartialOrd>(vals: &[T]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in vals.iter().enumerate() {
        if best.is_none_or(|b| v < &vals[b]) {
            best = Some(i);
        }
    }
    best
}

/// Minimum of the square over the unit ball and its exact vanishing on the
/// linked model's critical locus.
pub fn verify_nonneg_square(
    entry: &FormEntry,
    n_samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let form = bound_form(entry)?;
    let vol = volume_coefficient(&form)?;
    let fast = DyadicPoly::new(&vol, sampling::DYADIC_BITS)?;
    let points = sampling::ball_numerators(seed, n_samples);
    let values: Vec<BigInt> = points.par_iter().map(|n| fast.numerator(n)).collect();
    let mut report = VerificationReport::new(entry, seed, n_samples, &BigRational::zero());
    match argmin(&values) {
        Some(i) => report.checks.push(CheckResult::new(
            "nonneg_square",
            !values[i].is_negative(),
            rat_to_f64(&fast.value(&points[i])),
            witness_dyadic(&points[i]),
        )),
        None => report
            .checks
            .push(CheckResult::new("nonneg_square", true, 0.0, Vec::new())),
    }
    let model = entry.linked_model()?;
    if let Some(set) = &model.critical_set {
        report.checks.push(square_on_locus(&vol, set, seed)?);
    }
    Ok(report)
}

fn square_on_locus(vol: &Polynomial, set: &CriticalSet, seed: u64) -> Result<CheckResult> {
    match exact_locus_samples(set, SQUARE_LOCUS_SAMPLES, seed) {
        Some(pts) => {
            let bad = pts
                .iter()
                .find(|p| !eval_exact(std::slice::from_ref(vol), p)[0].is_zero());
            Ok(match bad {
                Some(p) => CheckResult::new("square_zero_on_locus", false, 0.0, witness_exact(p)),
                None => {
                    CheckResult::new("square_zero_on_locus", true, pts.len() as f64, Vec::new())
                }
            })
        }
        None => {
            // irrational radius: floating point on the parametrized curve
            let (lo, hi) = set.domain();
            let mut worst = 0.0f64;
            let mut at = [0.0; 4];
            for i in 0..SQUARE_LOCUS_SAMPLES {
                let u = lo + (hi - lo) * i as f64 / SQUARE_LOCUS_SAMPLES as f64;
                let (c, _) = set.point_f64(i % set.pieces(), u);
                let p = [c[0], c[1], 0.0, 0.0];
                let v = vol.eval_coords_f64(&p).abs();
                if v > worst {
                    worst = v;
                    at = p;
                }
            }
            Ok(CheckResult::new(
                "square_zero_on_locus",
                worst < ZERO_SET,
                worst,
                witness_f64(&at),
            ))
        }
    }
}

/// The zero set coincides with the linked model's critical locus: the form
/// vanishes identically at exact locus samples and the square is strictly
/// positive away from a `delta`-tube.
pub fn verify_zero_set(
    entry: &FormEntry,
    n_locus: usize,
    n_samples: usize,
    seed: u64,
    delta: &BigRational,
) -> Result<VerificationReport> {
    let form = bound_form(entry)?;
    let model = entry.linked_model()?;
    let set = model
        .critical_set
        .clone()
        .ok_or_else(|| Error::UnboundVariable("s".into()))?;
    let mut report = VerificationReport::new(entry, seed, n_samples, delta);
    match exact_locus_samples(&set, n_locus, seed ^ 0x5a5a) {
        Some(pts) => {
            let bad = pts
                .iter()
                .find(|p| !eval_exact(form.coeffs(), p).iter().all(Zero::is_zero));
            report.checks.push(match bad {
                Some(p) => CheckResult::new("form_zero_on_locus", false, 0.0, witness_exact(p)),
                None => CheckResult::new("form_zero_on_locus", true, pts.len() as f64, Vec::new()),
            });
        }
        None => {
            return Err(Error::Unsupported(
                "locus without rational parametrization".into(),
            ))
        }
    }
    let vol = volume_coefficient(&form)?;
    let fast = DyadicPoly::new(&vol, sampling::DYADIC_BITS)?;
    let d = rat_to_f64(delta);
    let tube = LocusDistance::new(&set);
    let points = sampling::ball_numerators(seed, n_samples);
    let values: Vec<Option<BigInt>> = points
        .par_iter()
        .map(|n| {
            if tube.distance(&dyadic_f64(n)) <= d {
                None
            } else {
                Some(fast.numerator(n))
            }
        })
        .collect();
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        if let Some(v) = v {
            if best.is_none_or(|b| v < values[b].as_ref().expect("kept")) {
                best = Some(i);
            }
        }
    }
    report.checks.push(match best {
        Some(i) => {
            let v = values[i].as_ref().expect("kept");
            let margin = rat_to_f64(&fast.value(&points[i]));
            CheckResult::new(
                "square_positive_off_locus",
                v.is_positive(),
                margin,
                witness_dyadic(&points[i]),
            )
        }
        None => CheckResult::new("square_positive_off_locus", true, 0.0, Vec::new()),
    });
    Ok(report)
}

/// Gradients of the six coefficients: `grad[i][j] = d c_i / d x_j`.
fn coefficient_gradients(form: &TwoForm) -> Vec<[Polynomial; 4]> {
    form.coeffs()
        .iter()
        .map(|c| std::array::from_fn(|j| c.derivative(Var::COORDS[j])))
        .collect()
}

fn values_f64(form: &TwoForm, p: &[f64; 4]) -> [f64; 6] {
    std::array::from_fn(|i| form.coeff(i).eval_coords_f64(p))
}

fn ensure_on_zero_set(form: &TwoForm, p: &[f64; 4]) -> Result<()> {
    let worst = values_f64(form, p)
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if worst > ZERO_SET {
        return Err(Error::NotOnZeroSet(worst));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transversality {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub pass: bool,
}

pub fn verify_transversality(entry: &FormEntry, point: &[f64; 4]) -> Result<Transversality> {
    let form = bound_form(entry)?;
    ensure_on_zero_set(&form, point)?;
    let grads = coefficient_gradients(&form);
    let m = nalgebra::Matrix6x4::from_fn(|i, j| grads[i][j].eval_coords_f64(point));
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let rank = sv.iter().filter(|&&v| v > RANK_SV).count();
    Ok(Transversality {
        rank,
        singular_values: sv,
        pass: rank == 3,
    })
}

/// `omega(u, w)` for a two-form given by its six coefficients.
pub fn pair_f64(c: &[f64; 6], u: &[f64; 4], w: &[f64; 4]) -> f64 {
    BASIS[2]
        .iter()
        .enumerate()
        .map(|(i, mask)| {
            let (a, b) = mask_pair(*mask);
            c[i] * (u[a] * w[b] - u[b] * w[a])
        })
        .sum()
}

fn pair_int(c: &[BigInt], u: &[BigInt; 4], w: &[BigInt; 4]) -> BigInt {
    BASIS[2]
        .iter()
        .enumerate()
        .fold(BigInt::zero(), |acc, (i, mask)| {
            let (a, b) = mask_pair(*mask);
            acc + &c[i] * (&u[a] * &w[b] - &u[b] * &w[a])
        })
}

fn mask_pair(mask: u8) -> (usize, usize) {
    let a = mask.trailing_zeros() as usize;
    let b = (mask & !(1 << a)).trailing_zeros() as usize;
    (a, b)
}

fn det4(m: &[&[BigInt; 4]; 4]) -> BigInt {
    // Laplace expansion along the first row over 3x3 minors
    let minor = |skip: usize| -> BigInt {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        let e = |r: usize, c: usize| &m[r][cols[c]];
        e(1, 0) * (e(2, 1) * e(3, 2) - e(2, 2) * e(3, 1))
            - e(1, 1) * (e(2, 0) * e(3, 2) - e(2, 2) * e(3, 0))
            + e(1, 2) * (e(2, 0) * e(3, 1) - e(2, 1) * e(3, 0))
    };
    (0..4).fold(BigInt::zero(), |acc, j| {
        let term = &m[0][j] * minor(j);
        if j % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

/// Positively oriented integer basis `(v1, v2)` of the common kernel of two
/// covectors: `(a, b, v1, v2)` is a positive frame. `None` if `a, b` are
/// dependent.
pub fn oriented_fiber_basis(a: &[BigInt; 4], b: &[BigInt; 4]) -> Option<[[BigInt; 4]; 2]> {
    let minor = |i: usize, j: usize| &a[i] * &b[j] - &a[j] * &b[i];
    let mut pivot: Option<(usize, usize, BigInt)> = None;
    for i in 0..4 {
        for j in i + 1..4 {
            let p = minor(i, j);
            if !p.is_zero() && pivot.as_ref().is_none_or(|q| p.abs() > q.2.abs()) {
                pivot = Some((i, j, p));
            }
        }
    }
    let (i, j, pij) = pivot?;
    let free: Vec<usize> = (0..4).filter(|&k| k != i && k != j).collect();
    let kernel_vector = |k: usize| -> [BigInt; 4] {
        let mut v: [BigInt; 4] = std::array::from_fn(|_| BigInt::zero());
        v[k] = pij.clone();
        v[i] = -minor(k, j);
        v[j] = -minor(i, k);
        v
    };
    let v1 = kernel_vector(free[0]);
    let mut v2 = kernel_vector(free[1]);
    if det4(&[a, b, &v1, &v2]).is_negative() {
        v2 = v2.map(|q| -q);
    }
    Some([v1, v2])
}

fn area_f64(u: &[BigInt; 4], w: &[BigInt; 4]) -> f64 {
    let to = |v: &[BigInt; 4]| -> [f64; 4] {
        std::array::from_fn(|k| v[k].to_f64().unwrap_or(f64::NAN))
    };
    let (u, w) = (to(u), to(w));
    let uu = dot4(&u, &u);
    let ww = dot4(&w, &w);
    let uw = dot4(&u, &w);
    (uu * ww - uw * uw).max(0.0).sqrt()
}

/// `omega` evaluated on oriented fibre tangent planes at seeded points of
/// the unit ball outside a `delta`-tube around the critical locus.
pub fn verify_fiber_positivity(
    entry: &FormEntry,
    model: &LocalModel,
    n_samples: usize,
    delta: &BigRational,
    seed: u64,
) -> Result<VerificationReport> {
    let form = bound_form(entry)?;
    let set = model
        .critical_set
        .clone()
        .ok_or_else(|| Error::UnboundVariable("s".into()))?;
    let bits = sampling::DYADIC_BITS;
    let rows: Vec<Vec<DyadicPoly>> = model
        .components
        .iter()
        .map(|c| {
            Var::COORDS
                .iter()
                .map(|v| DyadicPoly::new(&c.derivative(*v), bits))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let coeffs: Vec<DyadicPoly> = form
        .coeffs()
        .iter()
        .map(|c| DyadicPoly::new(c, bits))
        .collect::<Result<_>>()?;
    let d = rat_to_f64(delta);
    let tube = LocusDistance::new(&set);
    let points = sampling::ball_numerators(seed, n_samples);
    // (sign of omega(v1, v2), omega on the unit-area fibre plane)
    let evaluated: Vec<Option<Result<(i32, f64)>>> = points
        .par_iter()
        .map(|n| {
            if tube.distance(&dyadic_f64(n)) <= d {
                return None;
            }
            let row = |r: usize| -> [BigInt; 4] {
                let (nums, _) = common_numerators(&rows[r], n);
                std::array::from_fn(|k| nums[k].clone())
            };
            let (a, b) = (row(0), row(1));
            let Some([v1, v2]) = oriented_fiber_basis(&a, &b) else {
                return Some(Err(Error::ModelInconsistency(format!(
                    "rank of dF below 2 at ({}) outside the critical tube",
                    witness_dyadic(n).join(", ")
                ))));
            };
            let (c, den) = common_numerators(&coeffs, n);
            let val = pair_int(&c, &v1, &v2);
            let sign = if val.is_positive() {
                1
            } else if val.is_zero() {
                0
            } else {
                -1
            };
            let norm = val.to_f64().unwrap_or(f64::NAN)
                / den.to_f64().unwrap_or(f64::NAN)
                / area_f64(&v1, &v2);
            Some(Ok((sign, norm)))
        })
        .collect();
    let mut best: Option<(usize, f64)> = None;
    let mut first_bad: Option<usize> = None;
    for (i, e) in evaluated.iter().enumerate() {
        match e {
            None => {}
            Some(Err(err)) => return Err(err.clone()),
            Some(Ok((sign, norm))) => {
                if *sign <= 0 && first_bad.is_none() {
                    first_bad = Some(i);
                }
                if best.is_none_or(|(_, b)| *norm < b) {
                    best = Some((i, *norm));
                }
            }
        }
    }
    let mut report = VerificationReport::new(entry, seed, n_samples, delta);
    report.checks.push(match (first_bad, best) {
        (Some(i), _) => {
            let margin = match &evaluated[i] {
                Some(Ok((_, m))) => *m,
                _ => 0.0,
            };
            CheckResult::new("fiber_positive", false, margin, witness_dyadic(&points[i]))
        }
        (None, Some((i, m))) => {
            CheckResult::new("fiber_positive", true, m, witness_dyadic(&points[i]))
        }
        (None, None) => CheckResult::new("fiber_positive", true, 0.0, Vec::new()),
    });
    Ok(report)
}

/// All sampled near-symplectic checks for an entry, against its linked
/// model: closed, non-negative square, fibre positivity.
pub fn verify_entry(
    entry: &FormEntry,
    n_samples: usize,
    seed: u64,
    delta: &BigRational,
) -> Result<VerificationReport> {
    let form = bound_form(entry)?;
    let mut report = VerificationReport::new(entry, seed, n_samples, delta);
    report.checks.push(closed_check(&form));
    report.absorb(verify_nonneg_square(entry, n_samples, seed)?);
    let model = entry.linked_model()?;
    report.absorb(verify_fiber_positivity(
        entry, &model, n_samples, delta, seed,
    )?);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FindKOutcome {
    pub k: u32,
    pub report: VerificationReport,
    /// Report for k - 1 (the last failing value).
    pub previous: Option<VerificationReport>,
    /// Report for the pure form without the area term.
    pub baseline: VerificationReport,
}

/// Smallest integer k with `k dF1^dF2 + sigma` passing every sampled check.
pub fn find_k(
    sigma: &FormEntry,
    model: &LocalModel,
    k_max: u32,
    n_samples: usize,
    seed: u64,
    delta: &BigRational,
) -> Result<FindKOutcome> {
    if sigma.id != FormId::SigmaWrinkling || model.id != sigma.model {
        return Err(Error::Unsupported(format!(
            "area-term search for {} over {}",
            sigma.id.name(),
            model.id
        )));
    }
    let candidate = |k: u32| -> Result<VerificationReport> {
        let mut params: Params = sigma.params.clone();
        params.insert(Var::K, BigRational::from_integer(k.into()));
        let entry = get_form(FormId::OmegaWrinkling, &params)?;
        verify_entry(&entry, n_samples, seed, delta)
    };
    let baseline = candidate(0)?;
    let mut previous = baseline.clone();
    for k in 1..=k_max {
        let report = candidate(k)?;
        if report.passed() {
            return Ok(FindKOutcome {
                k,
                report,
                previous: Some(previous),
                baseline,
            });
        }
        previous = report;
    }
    Err(Error::KNotFound(k_max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenData {
    pub point: [f64; 4],
    pub tangent: [f64; 4],
    /// Symmetrized quadratic form in the basis `normal_basis`.
    pub matrix: [[f64; 3]; 3],
    pub normal_basis: [[f64; 4]; 3],
    /// Largest entry of the antisymmetric part before symmetrizing.
    pub asymmetry: f64,
    pub trace: f64,
    pub eigenvalues: [f64; 3],
    /// Unit eigenvector of the negative eigenvalue, in R^4.
    pub negative_line: [f64; 4],
}

fn normalize(v: [f64; 4]) -> [f64; 4] {
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.map(|a| a / n)
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal basis of the complement of a unit vector, built from the
/// three coordinate axes least aligned with it.
fn complement_basis(t: &[f64; 4]) -> [[f64; 4]; 3] {
    let mut axes = [0usize, 1, 2, 3];
    axes.sort_by(|a, b| {
        t[*a]
            .abs()
            .partial_cmp(&t[*b].abs())
            .expect("finite")
            .then(a.cmp(b))
    });
    let mut out: Vec<[f64; 4]> = Vec::new();
    for &ax in &axes[..3] {
        let mut v = [0.0; 4];
        v[ax] = 1.0;
        for b in std::iter::once(t).chain(out.iter()) {
            let c = dot4(&v, b);
            for i in 0..4 {
                v[i] -= c * b[i];
            }
        }
        out.push(normalize(v));
    }
    [out[0], out[1], out[2]]
}

/// Normal quadratic form `v -> (D_v omega)(T, v)` at a zero of the form.
pub fn eigenbundle(entry: &FormEntry, point: &[f64; 4], tangent: &[f64; 4]) -> Result<EigenData> {
    let form = bound_form(entry)?;
    eigenbundle_of(&form, point, tangent)
}

pub fn eigenbundle_of(form: &TwoForm, point: &[f64; 4], tangent: &[f64; 4]) -> Result<EigenData> {
    ensure_on_zero_set(form, point)?;
    let t = normalize(*tangent);
    let grads = coefficient_gradients(form);
    let g: Vec<[f64; 4]> = grads
        .iter()
        .map(|row| std::array::from_fn(|j| row[j].eval_coords_f64(point)))
        .collect();
    let basis = complement_basis(&t);
    let derivative_along = |v: &[f64; 4]| -> [f64; 6] { std::array::from_fn(|i| dot4(&g[i], v)) };
    let mut a = [[0.0; 3]; 3];
    for i in 0..3 {
        let dc = derivative_along(&basis[i]);
        for j in 0..3 {
            a[i][j] = pair_f64(&dc, &t, &basis[j]);
        }
    }
    let mut asym = 0.0f64;
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            asym = asym.max((a[i][j] - a[j][i]).abs());
            m[i][j] = 0.5 * (a[i][j] + a[j][i]);
        }
    }
    let eig = SymmetricEigen::new(Matrix3::from_fn(|i, j| m[i][j]));
    let mut order = [0usize, 1, 2];
    order.sort_by(|x, y| {
        eig.eigenvalues[*y]
            .partial_cmp(&eig.eigenvalues[*x])
            .expect("finite")
    });
    let eigenvalues = order.map(|k| eig.eigenvalues[k]);
    let pos = eigenvalues.iter().filter(|&&v| v > RANK_SV).count();
    let neg = eigenvalues.iter().filter(|&&v| v < -RANK_SV).count();
    if pos != 2 || neg != 1 {
        return Err(Error::SignatureError(eigenvalues.to_vec()));
    }
    let w = eig.eigenvectors.column(order[2]);
    let mut line = [0.0; 4];
    for (k, b) in basis.iter().enumerate() {
        for i in 0..4 {
            line[i] += w[k] * b[i];
        }
    }
    Ok(EigenData {
        point: *point,
        tangent: t,
        matrix: m,
        normal_basis: basis,
        asymmetry: asym,
        trace: m[0][0] + m[1][1] + m[2][2],
        eigenvalues,
        negative_line: normalize(line),
    })
}

impl EigenData {
    pub fn symmetric(&self) -> bool {
        self.asymmetry < SYMMETRY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

/// A closed zero circle in the plane y = z = 0 with a chosen direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCircle {
    pub set: CriticalSet,
    pub reversed: bool,
}

impl ZeroCircle {
    pub fn new(set: CriticalSet, reversed: bool) -> Result<ZeroCircle> {
        if !set.is_closed_curve() {
            return Err(Error::Unsupported("zero set is not a circle".into()));
        }
        Ok(ZeroCircle { set, reversed })
    }

    /// Point and unit tangent at angle `u`.
    pub fn at(&self, u: f64) -> ([f64; 4], [f64; 4]) {
        let (c, dc) = self.set.point_f64(0, u);
        let sign = if self.reversed { -1.0 } else { 1.0 };
        (
            [c[0], c[1], 0.0, 0.0],
            normalize([sign * dc[0], sign * dc[1], 0.0, 0.0]),
        )
    }
}

/// Parity of the negative eigen-line, transported once around the circle.
pub fn circle_parity_geometric(
    entry: &FormEntry,
    circle: &ZeroCircle,
    n_steps: usize,
) -> Result<Parity> {
    let form = bound_form(entry)?;
    circle_parity_of(&form, circle, n_steps)
}

pub fn circle_parity_of(form: &TwoForm, circle: &ZeroCircle, n_steps: usize) -> Result<Parity> {
    let line_at = |i: usize| -> Result<[f64; 4]> {
        let u = std::f64::consts::TAU * i as f64 / n_steps as f64;
        let (p, t) = circle.at(u);
        Ok(eigenbundle_of(form, &p, &t)?.negative_line)
    };
    let first = line_at(0)?;
    let mut prev = first;
    for i in 1..=n_steps {
        let mut v = line_at(i)?;
        let overlap = dot4(&v, &prev);
        if overlap.abs() < TRANSPORT_OVERLAP {
            return Err(Error::StepTooCoarse(overlap.abs()));
        }
        if overlap < 0.0 {
            v = v.map(|a| -a);
        }
        prev = v;
    }
    Ok(if dot4(&prev, &first) > 0.0 {
        Parity::Even
    } else {
        Parity::Odd
    })
}

/// Index of a basis word in the two-form coefficient vector.
pub fn two_form_slot(a: usize, b: usize) -> usize {
    basis_index(2, (1 << a) | (1 << b))
}

/// Transversality at exact (or, for irrational loci, sampled) points of
/// the linked model's critical locus.
pub fn transversality_check(entry: &FormEntry, n: usize, seed: u64) -> Result<CheckResult> {
    let set = entry
        .linked_model()?
        .critical_set
        .ok_or_else(|| Error::UnboundVariable("s".into()))?;
    let points: Vec<[f64; 4]> = match exact_locus_samples(&set, n, seed) {
        Some(pts) => pts.iter().map(sampling::to_f64).collect(),
        None => {
            let (lo, hi) = set.domain();
            (0..n)
                .map(|i| {
                    let u = lo + (hi - lo) * i as f64 / n as f64;
                    let (c, _) = set.point_f64(i % set.pieces(), u);
                    [c[0], c[1], 0.0, 0.0]
                })
                .collect()
        }
    };
    let mut worst = f64::INFINITY;
    for p in &points {
        let t = verify_transversality(entry, p)?;
        if !t.pass {
            return Ok(CheckResult::new(
                "rank_3_transversality",
                false,
                t.singular_values[2],
                witness_f64(p),
            ));
        }
        worst = worst.min(t.singular_values[2]);
    }
    Ok(CheckResult::new(
        "rank_3_transversality",
        true,
        if points.is_empty() { 0.0 } else { worst },
        Vec::new(),
    ))
}

/// Every check the catalog claims for an entry.
pub fn verify_claims(
    entry: &FormEntry,
    n_samples: usize,
    seed: u64,
    delta: &BigRational,
) -> Result<VerificationReport> {
    let form = bound_form(entry)?;
    let mut report = VerificationReport::new(entry, seed, n_samples, delta);
    for claim in &entry.claims {
        match claim {
            Claim::Closed => report.checks.push(closed_check(&form)),
            Claim::NonnegSquare => report.absorb(verify_nonneg_square(entry, n_samples, seed)?),
            Claim::Transverse => {
                if entry.linked_model()?.critical_set == Some(CriticalSet::Empty) {
                    report
                        .checks
                        .push(CheckResult::new("zero_set_empty", true, 0.0, Vec::new()));
                }
                report.absorb(verify_zero_set(
                    entry,
                    LOCUS_SAMPLES,
                    n_samples,
                    seed,
                    delta,
                )?);
                report
                    .checks
                    .push(transversality_check(entry, LOCUS_SAMPLES, seed)?);
            }
            Claim::FiberPositive(m) => {
                let model = get_model(*m, &entry.model_params())?;
                report.absorb(verify_fiber_positivity(
                    entry, &model, n_samples, delta, seed,
                )?);
            }
            Claim::Equals(other) => {
                let o = get_form(*other, &entry.params)?;
                let diff = form.sub(&bound_form(&o)?)?;
                report.checks.push(CheckResult::new(
                    &format!("equals_{}", other.name()),
                    diff.is_zero(),
                    0.0,
                    Vec::new(),
                ));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{get_model, params_from_pairs, ModelId};
    use crate::symcalc::{parse_rational, rat, Form};

    fn ls() -> FormEntry {
        get_form(
            FormId::Ls,
            &params_from_pairs(&[("s", "1/4"), ("eps", "1/6")]).unwrap(),
        )
        .unwrap()
    }

    fn delta() -> BigRational {
        parse_rational("1/20").unwrap()
    }

    #[test]
    fn catalog_closed() {
        let p = params_from_pairs(&[("s", "1/4"), ("eps", "1/6"), ("k", "3")]).unwrap();
        for id in FormId::ALL {
            let mut entry = get_form(id, &Params::new()).unwrap();
            assert!(verify_closed(&entry.symbolic).pass, "{}", id.name());
            entry.params = p.clone();
            assert!(verify_closed(&entry.form()).pass);
        }
    }

    #[test]
    fn naive_cusp_form_not_closed() {
        let naive = crate::models::rescaled_self_dual(&"x^3-3*x*t+y^2-z^2".parse().unwrap());
        let r = verify_closed(&naive);
        assert!(!r.pass);
        assert!(!r.residual.is_zero());
    }

    #[test]
    fn ls_square_and_zero_set() {
        let r = verify_nonneg_square(&ls(), 400, 42).unwrap();
        assert!(r.passed(), "{r:?}");
        let z = verify_zero_set(&ls(), 20, 400, 42, &delta()).unwrap();
        assert!(z.passed(), "{z:?}");
    }

    #[test]
    fn ls_transversality() {
        let t = verify_transversality(&ls(), &[0.5, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(t.rank, 3);
        assert!(matches!(
            verify_transversality(&ls(), &[0.0; 4]),
            Err(Error::NotOnZeroSet(_))
        ));
        let mut zero = ls();
        zero.symbolic = Form::zero(2).unwrap();
        let t0 = verify_transversality(&zero, &[0.3, 0.1, 0.0, 0.0]).unwrap();
        assert_eq!(t0.rank, 0);
        assert!(!t0.pass);
    }

    #[test]
    fn fiber_positivity_ls() {
        let e = ls();
        let m = e.linked_model().unwrap();
        let r = verify_fiber_positivity(&e, &m, 300, &delta(), 7).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn fiber_sign_matches_wedge_identity() {
        // omega(v1, v2) has the sign of dF1 ^ dF2 ^ omega
        let e = ls();
        let m = e.linked_model().unwrap();
        let form = e.form();
        let top = crate::symcalc::wedge(&m.pullback_area(), &form).unwrap();
        let top = DyadicPoly::new(top.coeff(0), sampling::DYADIC_BITS).unwrap();
        let coeffs: Vec<DyadicPoly> = form
            .coeffs()
            .iter()
            .map(|c| DyadicPoly::new(c, 20).unwrap())
            .collect();
        for n in sampling::ball_numerators(3, 200) {
            let p = n.map(|v| crate::symcalc::rat(v, 1 << 20));
            let jac = m.jacobian(&p).unwrap();
            let scale = BigInt::from(1i64 << 40);
            let row = |r: usize| -> [BigInt; 4] {
                std::array::from_fn(|k| {
                    let q = &jac[r][k] * BigRational::from_integer(scale.clone());
                    assert!(q.is_integer());
                    q.to_integer()
                })
            };
            let Some([v1, v2]) = oriented_fiber_basis(&row(0), &row(1)) else {
                continue;
            };
            let (c, _) = common_numerators(&coeffs, &n);
            let val = pair_int(&c, &v1, &v2);
            assert_eq!(val.signum(), BigInt::from(top.sign(&n)));
        }
    }

    #[test]
    fn integer_kernel_is_oriented() {
        let a = [1, 2, 0, -1].map(BigInt::from);
        let b = [0, 1, 3, 1].map(BigInt::from);
        let [v1, v2] = oriented_fiber_basis(&a, &b).unwrap();
        for v in [&v1, &v2] {
            let dot =
                |u: &[BigInt; 4]| -> BigInt { u.iter().zip(v.iter()).map(|(x, y)| x * y).sum() };
            assert!(dot(&a).is_zero() && dot(&b).is_zero());
        }
        assert!(det4(&[&a, &b, &v1, &v2]).is_positive());
        assert!(oriented_fiber_basis(&a, &a.clone().map(|q| q * 2)).is_none());
    }

    #[test]
    fn ls_normal_form() {
        let d = eigenbundle(&ls(), &[0.5, 0.0, 0.0, 0.0], &[0.0, -1.0, 0.0, 0.0]).unwrap();
        assert!(d.symmetric());
        let e = d.eigenvalues;
        assert!(
            (e[0] - 2.0).abs() < 1e-12 && (e[1] - 0.5).abs() < 1e-12 && (e[2] + 2.0).abs() < 1e-12
        );
        // the opposite direction flips every eigenvalue
        assert!(matches!(
            eigenbundle(&ls(), &[0.5, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]),
            Err(Error::SignatureError(_))
        ));
    }

    #[test]
    fn rank_two_gradient_rejected() {
        let form = Form::parse_terms(2, "tx: t-1/2; yz: y").unwrap();
        assert!(matches!(
            eigenbundle_of(&form, &[0.5, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]),
            Err(Error::SignatureError(_))
        ));
    }

    #[test]
    fn constant_line_is_even() {
        let form = Form::parse_terms(
            2,
            "tx: t^2+x^2-1/4; yz: t^2+x^2-1/4; ty: -4*x*y; xy: 4*t*y; tz: 4*x*z; xz: -4*t*z",
        )
        .unwrap();
        let set = CriticalSet::Circle {
            ct: BigRational::zero(),
            r2: rat(1, 4),
            orient: 1,
        };
        let fwd = circle_parity_of(&form, &ZeroCircle::new(set.clone(), false).unwrap(), 90);
        let back = circle_parity_of(&form, &ZeroCircle::new(set, true).unwrap(), 90);
        let ok: Vec<_> = [fwd, back].into_iter().filter_map(|r| r.ok()).collect();
        assert_eq!(ok, vec![Parity::Even]);
    }

    #[test]
    fn ls_parity_stable_under_refinement() {
        let model =
            get_model(ModelId::Birth, &params_from_pairs(&[("s", "1/4")]).unwrap()).unwrap();
        let circle = ZeroCircle::new(model.critical_set.unwrap(), true).unwrap();
        let a = circle_parity_geometric(&ls(), &circle, 720).unwrap();
        let b = circle_parity_geometric(&ls(), &circle, 1440).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            circle_parity_geometric(&ls(), &circle, 2),
            Err(Error::StepTooCoarse(_))
        ));
    }

    #[test]
    fn claims_follow_the_catalog() {
        let p = |pairs: &[(&str, &str)]| params_from_pairs(pairs).unwrap();
        let ls = get_form(FormId::Ls, &p(&[("s", "1/4"), ("eps", "1/6")])).unwrap();
        let r = verify_claims(&ls, 400, 42, &delta()).unwrap();
        assert!(r.passed(), "{r:?}");
        for name in [
            "closed",
            "nonneg_square",
            "rank_3_transversality",
            "fiber_positive",
        ] {
            assert!(r.checks.iter().any(|c| c.name.starts_with(name)), "{name}");
        }
        let empty = get_form(FormId::Ls, &p(&[("s", "-1"), ("eps", "1/6")])).unwrap();
        let r = verify_claims(&empty, 400, 42, &delta()).unwrap();
        assert_eq!(r.check("zero_set_empty").unwrap().status, Status::Pass);
        assert_eq!(r.check("closed").unwrap().status, Status::Pass);
        let eq1 = get_form(FormId::Eq1Birth, &p(&[("s", "1/4"), ("eps", "1/6")])).unwrap();
        let r = verify_claims(&eq1, 200, 1, &delta()).unwrap();
        assert_eq!(r.check("equals_LS").unwrap().status, Status::Pass);
    }
}
