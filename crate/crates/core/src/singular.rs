//! Critical sets, critical-value curves, cusp counting and the
//! fold / cusp / Lefschetz discrimination for catalog models.

use num::{BigRational, One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, QMatrix};
use crate::models::{CriticalSet, LocalModel};
use crate::sampling;
use crate::symcalc::{coord_assignment, format_rational, rat, rat_to_f64, Polynomial, Var};
use crate::tolerances::{
    BISECT_WIDTH, CUSP_GRID, LOCUS_SAMPLES, PENCIL_SAMPLES, ROOT_MERGE, VELOCITY_ZERO,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocusKind {
    Variety,
    ParametrizedCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalLocus {
    pub kind: LocusKind,
    pub set: CriticalSet,
    /// Implicit equations in (t, x); y = z = 0 throughout.
    pub equations: Vec<Polynomial>,
    /// Number of samples whose Jacobian rank was checked.
    pub checked_samples: usize,
}

impl CriticalLocus {
    pub fn is_empty(&self) -> bool {
        self.set == CriticalSet::Empty
    }
}

fn locus_of(model: &LocalModel) -> Result<CriticalSet> {
    match &model.critical_set {
        Some(cs) => Ok(cs.clone()),
        None => Err(Error::UnboundVariable(Var::S.name().into())),
    }
}

/// Numeric rank of a 2x4 matrix through its singular values.
pub fn numeric_rank_2x4(j: &[[f64; 4]; 2], tol: f64) -> usize {
    let m = nalgebra::Matrix2x4::from_fn(|r, c| j[r][c]);
    m.singular_values().iter().filter(|&&v| v > tol).count()
}

/// Closed-form critical locus, cross-checked on seeded samples.
pub fn critical_points(model: &LocalModel) -> Result<CriticalLocus> {
    let set = locus_of(model)?;
    let kind = match set {
        CriticalSet::Empty | CriticalSet::Origin => LocusKind::Variety,
        _ => LocusKind::ParametrizedCurve,
    };
    let mut checked = 0;
    if set != CriticalSet::Empty {
        let params = sampling::dyadic_in(0x10c05, LOCUS_SAMPLES, -1.0, 1.0);
        for (i, m) in params.iter().enumerate() {
            let piece = i % set.pieces();
            match set.exact_point(piece, m) {
                Some(p) => {
                    let r = model.jacobian_rank(&p)?;
                    if r > 1 {
                        return Err(Error::ModelInconsistency(format!(
                            "locus sample ({}, {}) has jacobian rank {}",
                            p[0], p[1], r
                        )));
                    }
                }
                None => {
                    // irrational radius: check in floating point
                    let (lo, hi) = set.domain();
                    let u = lo + (hi - lo) * (rat_to_f64(m) + 1.0) / 2.0;
                    let (tx, _) = set.point_f64(piece, u);
                    let j = model.jacobian_f64(&[tx[0], tx[1], 0.0, 0.0]);
                    let r = numeric_rank_2x4(&j, crate::tolerances::RANK_SV);
                    if r > 1 {
                        return Err(Error::ModelInconsistency(format!(
                            "locus sample ({}, {}) has numeric jacobian rank {}",
                            tx[0], tx[1], r
                        )));
                    }
                }
            }
            checked += 1;
        }
    }
    Ok(CriticalLocus {
        kind,
        equations: set.equations(),
        set,
        checked_samples: checked,
    })
}

/// Exact points of the locus for `n` seeded rational curve parameters,
/// or `None` when the locus has no rational parametrization.
pub fn exact_locus_samples(
    set: &CriticalSet,
    n: usize,
    seed: u64,
) -> Option<Vec<[BigRational; 4]>> {
    let (lo, hi) = match set {
        CriticalSet::Empty => return Some(Vec::new()),
        CriticalSet::Origin => return Some(vec![std::array::from_fn(|_| BigRational::zero())]),
        CriticalSet::Circle { .. } => (-3.0, 3.0),
        CriticalSet::Hyperbola { .. } => (1.0 / 3.0, 3.0),
        CriticalSet::CrossedLines => (-0.5, 0.5),
        CriticalSet::Graph { .. } => (-1.0, 1.0),
    };
    let params = sampling::dyadic_in(seed, n, lo, hi);
    params
        .iter()
        .enumerate()
        .map(|(i, m)| set.exact_point(i % set.pieces(), m))
        .collect()
}

/// Euclidean distance to a critical locus, precompiled for repeated use.
/// Unbounded pieces are searched over their sampling domain only.
#[derive(Debug, Clone)]
pub struct LocusDistance {
    set: CriticalSet,
    /// Coefficients of t(x) by power of x for graph loci.
    graph: Vec<f64>,
}

impl LocusDistance {
    pub fn new(set: &CriticalSet) -> LocusDistance {
        let graph = match set {
            CriticalSet::Graph { t_of_x } => {
                let deg = t_of_x.degree_in(Var::X) as usize;
                let mut c = vec![0.0; deg + 1];
                for (e, q) in t_of_x.terms() {
                    c[e[Var::X.index()] as usize] += rat_to_f64(q);
                }
                c
            }
            _ => Vec::new(),
        };
        LocusDistance {
            set: set.clone(),
            graph,
        }
    }

    fn planar_point(&self, piece: usize, u: f64) -> [f64; 2] {
        match &self.set {
            CriticalSet::Graph { .. } => {
                let t = self.graph.iter().rev().fold(0.0, |acc, c| acc * u + c);
                [t, u]
            }
            other => other.point_f64(piece, u).0,
        }
    }

    pub fn distance(&self, p: &[f64; 4]) -> f64 {
        let off_plane = p[2] * p[2] + p[3] * p[3];
        let planar = match &self.set {
            CriticalSet::Empty => return f64::INFINITY,
            CriticalSet::Origin => p[0] * p[0] + p[1] * p[1],
            CriticalSet::Circle { ct, r2, .. } => {
                let r = rat_to_f64(r2).sqrt();
                let dt = p[0] - rat_to_f64(ct);
                let d = (dt * dt + p[1] * p[1]).sqrt() - r;
                d * d
            }
            set => (0..set.pieces())
                .map(|piece| self.planar_distance2(piece, [p[0], p[1]]))
                .fold(f64::INFINITY, f64::min),
        };
        (planar + off_plane).sqrt()
    }

    fn planar_distance2(&self, piece: usize, q: [f64; 2]) -> f64 {
        let (lo, hi) = self.set.domain();
        let d2 = |u: f64| {
            let c = self.planar_point(piece, u);
            (c[0] - q[0]).powi(2) + (c[1] - q[1]).powi(2)
        };
        let n = 512;
        let h = (hi - lo) / n as f64;
        let mut best = lo;
        let mut best_val = d2(lo);
        for i in 1..=n {
            let u = lo + h * i as f64;
            let v = d2(u);
            if v < best_val {
                best = u;
                best_val = v;
            }
        }
        // golden-section refinement in the neighbouring cells
        let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..60 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if d2(c) < d2(d) {
                b = d;
            } else {
                a = c;
            }
        }
        d2(0.5 * (a + b)).min(best_val)
    }
}

pub fn distance_to_locus(set: &CriticalSet, p: &[f64; 4]) -> f64 {
    LocusDistance::new(set).distance(p)
}

/// A parametrized plane curve with an analytic velocity.
pub trait PlaneCurve {
    fn point(&self, u: f64) -> [f64; 2];
    fn velocity(&self, u: f64) -> [f64; 2];
    fn domain(&self) -> (f64, f64);
    /// Closed curves are sampled on the half-open domain.
    fn periodic(&self) -> bool;
}

/// Image under the model of one piece of its critical locus.
pub struct ImageCurve<'a> {
    model: &'a LocalModel,
    set: CriticalSet,
    piece: usize,
    partials: [[Polynomial; 4]; 2],
}

impl<'a> ImageCurve<'a> {
    pub fn new(model: &'a LocalModel, set: CriticalSet, piece: usize) -> Self {
        let partials = std::array::from_fn(|i| {
            std::array::from_fn(|j| model.components[i].derivative(Var::COORDS[j]))
        });
        ImageCurve {
            model,
            set,
            piece,
            partials,
        }
    }

    /// Critical point in R^4 at curve parameter `u`.
    pub fn source(&self, u: f64) -> [f64; 4] {
        let (tx, _) = self.set.point_f64(self.piece, u);
        [tx[0], tx[1], 0.0, 0.0]
    }
}

impl PlaneCurve for ImageCurve<'_> {
    fn point(&self, u: f64) -> [f64; 2] {
        self.model.eval_f64(&self.source(u))
    }

    fn velocity(&self, u: f64) -> [f64; 2] {
        let (tx, dtx) = self.set.point_f64(self.piece, u);
        let p = [tx[0], tx[1], 0.0, 0.0];
        std::array::from_fn(|i| {
            self.partials[i][0].eval_coords_f64(&p) * dtx[0]
                + self.partials[i][1].eval_coords_f64(&p) * dtx[1]
        })
    }

    fn domain(&self) -> (f64, f64) {
        self.set.domain()
    }

    fn periodic(&self) -> bool {
        self.set.is_closed_curve()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSample {
    pub piece: usize,
    pub param: f64,
    pub source: [f64; 4],
    pub value: [f64; 2],
}

/// `n_samples` points of each piece of the critical-value curve.
pub fn critical_values(model: &LocalModel, n_samples: usize) -> Result<Vec<CurveSample>> {
    let set = locus_of(model)?;
    let mut out = Vec::new();
    if set == CriticalSet::Empty {
        return Ok(out);
    }
    if set == CriticalSet::Origin {
        let v = model.eval_f64(&[0.0; 4]);
        out.push(CurveSample {
            piece: 0,
            param: 0.0,
            source: [0.0; 4],
            value: v,
        });
        return Ok(out);
    }
    for piece in 0..set.pieces() {
        let curve = ImageCurve::new(model, set.clone(), piece);
        let (lo, hi) = curve.domain();
        let steps = if curve.periodic() {
            n_samples
        } else {
            n_samples.saturating_sub(1).max(1)
        };
        for i in 0..n_samples {
            let u = lo + (hi - lo) * i as f64 / steps as f64;
            out.push(CurveSample {
                piece,
                param: u,
                source: curve.source(u),
                value: curve.point(u),
            });
        }
    }
    Ok(out)
}

/// Exact critical value at a rational curve parameter.
pub fn critical_value_exact(
    model: &LocalModel,
    piece: usize,
    m: &BigRational,
) -> Result<Option<([BigRational; 4], [BigRational; 2])>> {
    let set = locus_of(model)?;
    match set.exact_point(piece, m) {
        Some(p) => {
            let v = model.eval(&p)?;
            Ok(Some((p, v)))
        }
        None => Ok(None),
    }
}

fn norm2(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Parameters where the velocity vanishes.
pub fn cusp_parameters(curve: &dyn PlaneCurve) -> Result<Vec<f64>> {
    let (lo, hi) = curve.domain();
    let n = CUSP_GRID;
    let grid: Vec<f64> = (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect();
    let vel: Vec<[f64; 2]> = grid.iter().map(|&u| curve.velocity(u)).collect();
    for w in vel.windows(2) {
        if norm2(w[0]) < VELOCITY_ZERO && norm2(w[1]) < VELOCITY_ZERO {
            return Err(Error::Degenerate(
                "velocity vanishes at consecutive grid points".into(),
            ));
        }
    }
    let mut roots: Vec<f64> = Vec::new();
    for comp in 0..2 {
        let f = |u: f64| curve.velocity(u)[comp];
        for i in 0..n {
            let (a, b) = (vel[i][comp], vel[i + 1][comp]);
            let candidate = if a == 0.0 {
                Some(grid[i])
            } else if b == 0.0 {
                Some(grid[i + 1])
            } else if (a > 0.0) != (b > 0.0) {
                Some(bisect(&f, grid[i], grid[i + 1]))
            } else {
                None
            };
            if let Some(u) = candidate {
                if norm2(curve.velocity(u)) < VELOCITY_ZERO {
                    roots.push(u);
                }
            }
        }
    }
    let period = hi - lo;
    let mut merged: Vec<f64> = Vec::new();
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    for u in roots {
        let u = if curve.periodic() && u >= hi - ROOT_MERGE {
            u - period
        } else {
            u
        };
        let dup = merged.iter().any(|&m| {
            let d = (m - u).abs();
            d < ROOT_MERGE || (curve.periodic() && (period - d).abs() < ROOT_MERGE)
        });
        if !dup {
            merged.push(u);
        }
    }
    merged.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    Ok(merged)
}

pub fn count_cusps_curve(curve: &dyn PlaneCurve) -> Result<usize> {
    Ok(cusp_parameters(curve)?.len())
}

/// Cusps of the critical-value curve, summed over its pieces.
pub fn count_cusps(model: &LocalModel) -> Result<usize> {
    Ok(cusp_locations(model)?.len())
}

/// (piece, parameter, image point) of every cusp.
pub fn cusp_locations(model: &LocalModel) -> Result<Vec<(usize, f64, [f64; 2])>> {
    let set = locus_of(model)?;
    match set {
        CriticalSet::Empty => return Ok(Vec::new()),
        CriticalSet::Origin => {
            return Err(Error::Unsupported(
                "critical set is a point, not a curve".into(),
            ))
        }
        _ => {}
    }
    let mut out = Vec::new();
    for piece in 0..set.pieces() {
        let curve = ImageCurve::new(model, set.clone(), piece);
        for u in cusp_parameters(&curve)? {
            out.push((piece, u, curve.point(u)));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SingularityTag {
    Fold,
    Cusp,
    LefschetzType,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityKind {
    pub tag: SingularityTag,
    /// Named exact quantities justifying the tag, as `p/q` strings.
    pub certificate: Vec<(String, String)>,
}

fn hessian(f: &Polynomial, vars: &[Var], p: &[BigRational; 4]) -> Result<QMatrix> {
    let asg = coord_assignment(p);
    vars.iter()
        .map(|a| {
            vars.iter()
                .map(|b| f.derivative(*a).derivative(*b).eval(&asg))
                .collect()
        })
        .collect()
}

/// Points on the unit circle with rational coordinates.
pub fn pencil_directions(n: usize) -> Vec<(BigRational, BigRational)> {
    (0..n)
        .map(|j| {
            let m = rat(j as i64 - (n as i64) / 2, 8);
            let one = BigRational::one();
            let den = &one + &m * &m;
            ((&one - &m * &m) / &den, (&m + &m) / den)
        })
        .collect()
}

pub fn classify(model: &LocalModel, point: &[BigRational; 4]) -> Result<SingularityKind> {
    let rank = model.jacobian_rank(point)?;
    let cert = |name: &str, q: &BigRational| (name.to_string(), format_rational(q));
    match rank {
        2 => Err(Error::NotCritical(2)),
        1 => {
            if !model.product_form {
                return Err(Error::Unsupported(format!(
                    "rank-1 point of non-product model {}",
                    model.id
                )));
            }
            let f = &model.components[1];
            let vars = [Var::X, Var::Y, Var::Z];
            let h = hessian(f, &vars, point)?;
            let det = linalg::det(&h);
            if !det.is_zero() {
                return Ok(SingularityKind {
                    tag: SingularityTag::Fold,
                    certificate: vec![cert("hessian_det", &det)],
                });
            }
            if linalg::rank(&h) < 2 {
                return Ok(SingularityKind {
                    tag: SingularityTag::Degenerate,
                    certificate: vec![("hessian_rank".into(), linalg::rank(&h).to_string())],
                });
            }
            let kappa = linalg::nullspace(&h, 3).remove(0);
            let asg = coord_assignment(point);
            // third directional derivative along the kernel
            let mut d3 = BigRational::zero();
            let mut dtk = BigRational::zero();
            for (i, a) in vars.iter().enumerate() {
                if kappa[i].is_zero() {
                    continue;
                }
                let fa = f.derivative(*a);
                dtk += &kappa[i] * fa.derivative(Var::T).eval(&asg)?;
                for (j, b) in vars.iter().enumerate() {
                    for (k, c) in vars.iter().enumerate() {
                        let w = &kappa[i] * &kappa[j] * &kappa[k];
                        if w.is_zero() {
                            continue;
                        }
                        d3 += w * fa.derivative(*b).derivative(*c).eval(&asg)?;
                    }
                }
            }
            let tag = if !d3.is_zero() && !dtk.is_zero() {
                SingularityTag::Cusp
            } else {
                SingularityTag::Degenerate
            };
            Ok(SingularityKind {
                tag,
                certificate: vec![
                    cert("cubic_along_kernel", &d3),
                    cert("dt_along_kernel", &dtk),
                ],
            })
        }
        _ => {
            let vars = Var::COORDS;
            let h1 = hessian(&model.components[0], &vars, point)?;
            let h2 = hessian(&model.components[1], &vars, point)?;
            let mut min_abs: Option<BigRational> = None;
            for (l1, l2) in pencil_directions(PENCIL_SAMPLES) {
                let m: QMatrix = (0..4)
                    .map(|i| (0..4).map(|j| &l1 * &h1[i][j] + &l2 * &h2[i][j]).collect())
                    .collect();
                let det = num::Signed::abs(&linalg::det(&m));
                if det.is_zero() {
                    return Ok(SingularityKind {
                        tag: SingularityTag::Degenerate,
                        certificate: vec![cert("pencil_l1", &l1), cert("pencil_l2", &l2)],
                    });
                }
                if min_abs.as_ref().is_none_or(|m| &det < m) {
                    min_abs = Some(det);
                }
            }
            Ok(SingularityKind {
                tag: SingularityTag::LefschetzType,
                certificate: vec![cert("min_abs_pencil_det", &min_abs.expect("samples"))],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{get_model, params_from_pairs, ModelId, Params};
    use crate::symcalc::rat_int;

    fn model(id: ModelId, s: Option<&str>) -> LocalModel {
        let p = match s {
            Some(v) => params_from_pairs(&[("s", v)]).unwrap(),
            None => Params::new(),
        };
        get_model(id, &p).unwrap()
    }

    fn pt(t: i64, x: i64) -> [BigRational; 4] {
        [rat_int(t), rat_int(x), rat_int(0), rat_int(0)]
    }

    #[test]
    fn birth_loci() {
        assert!(critical_points(&model(ModelId::Birth, Some("-1")))
            .unwrap()
            .is_empty());
        let l = critical_points(&model(ModelId::Birth, Some("1"))).unwrap();
        assert_eq!(l.equations, vec!["t^2+x^2-1".parse().unwrap()]);
        assert_eq!(l.checked_samples, LOCUS_SAMPLES);
        // irrational radius falls back to floating point
        assert!(critical_points(&model(ModelId::Birth, Some("1/3"))).is_ok());
    }

    #[test]
    fn every_catalog_locus_is_critical() {
        for (id, s) in [
            (ModelId::Cusp, None),
            (ModelId::Merging, Some("1")),
            (ModelId::Merging, Some("-1")),
            (ModelId::Merging, Some("0")),
            (ModelId::Flipping, Some("1")),
            (ModelId::Wrinkling, Some("1")),
            (ModelId::AchiralWrinkling, Some("1")),
            (ModelId::Lefschetz, None),
        ] {
            let l = critical_points(&model(id, s)).unwrap();
            assert_eq!(l.checked_samples, LOCUS_SAMPLES, "{id}");
        }
    }

    #[test]
    fn wrinkling_values() {
        let m = model(ModelId::Wrinkling, Some("1"));
        let curve = ImageCurve::new(&m, m.critical_set.clone().unwrap(), 0);
        let at_pi = curve.point(std::f64::consts::PI);
        assert!(at_pi[0].abs() < 1e-15 && at_pi[1].abs() < 1e-15);
        // theta = 0 is the stereographic parameter m = 0
        let (_, v) = critical_value_exact(&m, 0, &BigRational::zero())
            .unwrap()
            .unwrap();
        assert_eq!(v, [rat(-1, 4), rat_int(0)]);
    }

    #[test]
    fn cusp_curve_contains_quarter_point() {
        let m = model(ModelId::Cusp, None);
        for x in [rat(1, 2), rat(-1, 2)] {
            let (_, v) = critical_value_exact(&m, 0, &x).unwrap().unwrap();
            assert_eq!(v[0], rat(1, 4));
            assert_eq!(rat_int(4) * &v[0] * &v[0] * &v[0], &v[1] * &v[1]);
        }
    }

    #[test]
    fn cusp_counts() {
        assert_eq!(
            count_cusps(&model(ModelId::Wrinkling, Some("1"))).unwrap(),
            3
        );
        assert_eq!(count_cusps(&model(ModelId::Birth, Some("1"))).unwrap(), 2);
        assert_eq!(count_cusps(&model(ModelId::Merging, Some("1"))).unwrap(), 2);
        assert_eq!(
            count_cusps(&model(ModelId::Flipping, Some("1"))).unwrap(),
            2
        );
        assert_eq!(count_cusps(&model(ModelId::Cusp, None)).unwrap(), 1);
        assert_eq!(
            count_cusps(&model(ModelId::Merging, Some("-1"))).unwrap(),
            0
        );
        assert_eq!(count_cusps(&model(ModelId::Birth, Some("-1"))).unwrap(), 0);
    }

    #[test]
    fn wrinkling_cusp_angles() {
        let m = model(ModelId::Wrinkling, Some("1"));
        let locs = cusp_locations(&m).unwrap();
        let mut angles: Vec<f64> = locs.iter().map(|l| l.1).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pi = std::f64::consts::PI;
        for (a, e) in angles.iter().zip([pi / 3.0, pi, 5.0 * pi / 3.0]) {
            assert!((a - e).abs() < 1e-9, "{a} vs {e}");
        }
    }

    struct Stalled;
    impl PlaneCurve for Stalled {
        fn point(&self, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn velocity(&self, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn domain(&self) -> (f64, f64) {
            (0.0, 1.0)
        }
        fn periodic(&self) -> bool {
            false
        }
    }

    #[test]
    fn locus_distances() {
        let cusp = model(ModelId::Cusp, None).critical_set.unwrap();
        assert!(distance_to_locus(&cusp, &[0.25, 0.5, 0.0, 0.0]) < 1e-12);
        assert!((distance_to_locus(&cusp, &[0.25, 0.5, 0.3, 0.4]) - 0.5).abs() < 1e-12);
        let birth = model(ModelId::Birth, Some("1/4")).critical_set.unwrap();
        assert!((distance_to_locus(&birth, &[0.0; 4]) - 0.5).abs() < 1e-15);
        let merging = model(ModelId::Merging, Some("1")).critical_set.unwrap();
        assert!((distance_to_locus(&merging, &[0.0; 4]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_curve_rejected() {
        assert!(matches!(
            count_cusps_curve(&Stalled),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn classification() {
        let cusp = model(ModelId::Cusp, None);
        assert_eq!(
            classify(&cusp, &pt(0, 0)).unwrap().tag,
            SingularityTag::Cusp
        );
        let birth = model(ModelId::Birth, Some("1"));
        let fold = classify(&birth, &pt(0, 1)).unwrap();
        assert_eq!(fold.tag, SingularityTag::Fold);
        assert_eq!(fold.certificate[0].1, "-24/1");
        assert_eq!(
            classify(&birth, &pt(1, 0)).unwrap().tag,
            SingularityTag::Cusp
        );
        assert_eq!(
            classify(&birth, &pt(-1, 0)).unwrap().tag,
            SingularityTag::Cusp
        );
        let w0 = model(ModelId::Wrinkling, Some("0"));
        assert_eq!(
            classify(&w0, &pt(0, 0)).unwrap().tag,
            SingularityTag::LefschetzType
        );
        let a0 = model(ModelId::Achiral, None);
        assert_eq!(
            classify(&a0, &pt(0, 0)).unwrap().tag,
            SingularityTag::LefschetzType
        );
        assert_eq!(classify(&birth, &pt(0, 2)), Err(Error::NotCritical(2)));
        let w1 = model(ModelId::Wrinkling, Some("1"));
        assert!(matches!(
            classify(&w1, &[rat(-1, 2), rat_int(0), rat_int(0), rat_int(0)]),
            Err(Error::Unsupported(_))
        ));
        let b0 = model(ModelId::Birth, Some("0"));
        assert_eq!(
            classify(&b0, &pt(0, 0)).unwrap().tag,
            SingularityTag::Degenerate
        );
    }
}
