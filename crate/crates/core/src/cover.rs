//! Fibres of the wrinkling map as double covers of the u-plane: branch
//! points over a base value, the resulting fibre type, and which pair of
//! branch points collides along a path in the base.

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerances::{COLLISION, ROOT_RESIDUAL};

/// Distinct roots closer than this are reported as one point of
/// multiplicity two.
const MERGE: f64 = 1e-9;
/// Companion eigenvalues with a larger relative imaginary part are complex.
const IMAG_CUTOFF: f64 = 1e-6;
/// Smallest parameter step before an ambiguous match is an error.
const MIN_STEP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BranchPoint {
    pub t: f64,
    pub x: f64,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchSet {
    pub s: f64,
    pub w: [f64; 2],
    pub points: Vec<BranchPoint>,
}

impl BranchSet {
    pub fn simple(&self) -> bool {
        self.points.iter().all(|p| p.multiplicity == 1)
    }

    pub fn max_residual(&self) -> f64 {
        self.points
            .iter()
            .map(|p| residual(self.s, self.w, p.t, p.x))
            .fold(0.0, f64::max)
    }
}

fn equations(s: f64, w: [f64; 2], t: f64, x: f64) -> [f64; 2] {
    [t * t - x * x + s * t - w[0], 2.0 * t * x - w[1]]
}

fn residual(s: f64, w: [f64; 2], t: f64, x: f64) -> f64 {
    let r = equations(s, w, t, x);
    r[0].abs().max(r[1].abs())
}

/// Newton iteration on the 2x2 system from a good starting point.
fn polish(s: f64, w: [f64; 2], mut t: f64, mut x: f64) -> (f64, f64) {
    for _ in 0..50 {
        let r = equations(s, w, t, x);
        if r[0].abs().max(r[1].abs()) < 1e-15 {
            break;
        }
        let (a, b, c, d) = (2.0 * t + s, -2.0 * x, 2.0 * x, 2.0 * t);
        let det = a * d - b * c;
        if det == 0.0 {
            break;
        }
        let dt = (d * r[0] - b * r[1]) / det;
        let dx = (a * r[1] - c * r[0]) / det;
        t -= dt;
        x -= dx;
        if dt.abs().max(dx.abs()) < 1e-17 {
            break;
        }
    }
    (t, x)
}

/// Real roots of a monic quartic `x^4 + c3 x^3 + c2 x^2 + c1 x + c0`.
pub fn quartic_real_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let companion = Matrix4::new(
        0.0, 0.0, 0.0, -c0, //
        1.0, 0.0, 0.0, -c1, //
        0.0, 1.0, 0.0, -c2, //
        0.0, 0.0, 1.0, -c3,
    );
    let p = |x: f64| (((x + c3) * x + c2) * x + c1) * x + c0;
    let dp = |x: f64| ((4.0 * x + 3.0 * c3) * x + 2.0 * c2) * x + c1;
    let mut out = Vec::new();
    for z in companion.complex_eigenvalues().iter() {
        if z.im.abs() > IMAG_CUTOFF * z.re.abs().max(1.0) {
            continue;
        }
        let mut x = z.re;
        for _ in 0..20 {
            let d = dp(x);
            if d == 0.0 {
                break;
            }
            let step = p(x) / d;
            x -= step;
            if step.abs() < 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        out.push(x);
    }
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    out
}

fn merge_points(s: f64, w: [f64; 2], raw: Vec<(f64, f64)>) -> Vec<BranchPoint> {
    let mut pts: Vec<BranchPoint> = Vec::new();
    for (t, x) in raw {
        if residual(s, w, t, x) > ROOT_RESIDUAL {
            continue;
        }
        if let Some(p) = pts
            .iter_mut()
            .find(|p| (p.t - t).abs() < MERGE && (p.x - x).abs() < MERGE)
        {
            p.multiplicity = 2;
            continue;
        }
        pts.push(BranchPoint {
            t,
            x,
            multiplicity: 1,
        });
    }
    pts.sort_by(|a, b| {
        a.t.partial_cmp(&b.t)
            .expect("finite")
            .then(a.x.partial_cmp(&b.x).expect("finite"))
    });
    pts
}

/// Real solutions of `t^2 - x^2 + s t = w1`, `2 t x = w2`.
pub fn branch_points(s: f64, w: [f64; 2]) -> BranchSet {
    let mut raw = Vec::new();
    if w[1] == 0.0 {
        // t x = 0 splits into two quadratics
        if w[0] <= 0.0 {
            let r = (-w[0]).sqrt();
            raw.push((0.0, r));
            raw.push((0.0, -r));
        }
        let disc = s * s + 4.0 * w[0];
        if disc >= 0.0 {
            let r = disc.sqrt() / 2.0;
            raw.push((-s / 2.0 + r, 0.0));
            raw.push((-s / 2.0 - r, 0.0));
        }
    } else {
        // x = w2 / (2t) turns the system into 4t^4 + 4s t^3 - 4w1 t^2 - w2^2 = 0
        for t in quartic_real_roots(s, -w[0], 0.0, -w[1] * w[1] / 4.0) {
            if t == 0.0 {
                continue;
            }
            raw.push(polish(s, w, t, w[1] / (2.0 * t)));
        }
    }
    BranchSet {
        s,
        w,
        points: merge_points(s, w, raw),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FiberType {
    Cylinder,
    DoublyPuncturedTorus,
    Transitional,
}

pub fn fiber_type(s: f64, w: [f64; 2]) -> FiberType {
    let b = branch_points(s, w);
    match (b.points.len(), b.simple()) {
        (4, true) => FiberType::DoublyPuncturedTorus,
        (2, true) => FiberType::Cylinder,
        _ => FiberType::Transitional,
    }
}

/// A straight segment in the base, parametrized by `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BasePath {
    pub from: [f64; 2],
    pub to: [f64; 2],
}

impl BasePath {
    pub fn at(&self, u: f64) -> [f64; 2] {
        [
            self.from[0] + u * (self.to[0] - self.from[0]),
            self.from[1] + u * (self.to[1] - self.from[1]),
        ]
    }
}

/// The three segments leaving the interior of the cuspoid at `s = 2`.
pub fn canonical_paths() -> [(&'static str, BasePath); 3] {
    [
        (
            "real",
            BasePath {
                from: [-0.5, 0.0],
                to: [-1.5, 0.0],
            },
        ),
        (
            "upper",
            BasePath {
                from: [-0.5, 0.0],
                to: [-0.5, 2.0],
            },
        ),
        (
            "lower",
            BasePath {
                from: [-0.5, 0.0],
                to: [-0.5, -2.0],
            },
        ),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Collision {
    pub param: f64,
    /// Labels of the colliding points, in the order of the starting set.
    pub pair: (usize, usize),
    pub start: Vec<BranchPoint>,
    pub base_point: [f64; 2],
}

fn dist(a: &(f64, f64), b: &(f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Match each new point to a distinct tracked point by nearest neighbour;
/// `None` when two new points claim the same tracked point.
fn nearest_matching(tracked: &[(usize, (f64, f64))], new: &[(f64, f64)]) -> Option<Vec<usize>> {
    let mut used = vec![false; tracked.len()];
    let mut out = Vec::new();
    for p in new {
        let (j, _) = tracked
            .iter()
            .enumerate()
            .map(|(j, q)| (j, dist(&q.1, p)))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))?;
        if used[j] {
            return None;
        }
        used[j] = true;
        out.push(j);
    }
    Some(out)
}

fn coords(b: &BranchSet) -> Vec<(f64, f64)> {
    b.points.iter().map(|p| (p.t, p.x)).collect()
}

fn closest_pair(tracked: &[(usize, (f64, f64))]) -> (usize, usize, f64) {
    let mut best = (0, 1, f64::INFINITY);
    for i in 0..tracked.len() {
        for j in i + 1..tracked.len() {
            let d = dist(&tracked[i].1, &tracked[j].1);
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

fn label_pair(tracked: &[(usize, (f64, f64))], i: usize, j: usize) -> (usize, usize) {
    let (a, b) = (tracked[i].0, tracked[j].0);
    (a.min(b), a.max(b))
}

/// Follow the four branch points along `path` with `n_steps` uniform steps
/// (halved locally when matching is ambiguous) and report the first pair
/// that collides.
pub fn trace_collision(s: f64, path: &BasePath, n_steps: usize) -> Result<Collision> {
    let start = branch_points(s, path.from);
    if start.points.len() != 4 || !start.simple() {
        return Err(Error::ParamOutOfRange {
            name: "path".into(),
            detail: format!(
                "starts over a fibre with {} branch points",
                start.points.len()
            ),
        });
    }
    let mut tracked: Vec<(usize, (f64, f64))> = coords(&start).into_iter().enumerate().collect();
    let mut u = 0.0;
    let mut h = 1.0 / n_steps as f64;
    let finish = |param: f64, pair: (usize, usize)| Collision {
        param,
        pair,
        start: start.points.clone(),
        base_point: path.at(param),
    };
    while u < 1.0 {
        let next = (u + h).min(1.0);
        let b = branch_points(s, path.at(next));
        let pts = coords(&b);
        match pts.len() {
            4 => {
                let Some(m) = nearest_matching(&tracked, &pts) else {
                    h /= 2.0;
                    if h < MIN_STEP {
                        return Err(Error::RefineStep(h));
                    }
                    continue;
                };
                let mut updated = tracked.clone();
                for (p, j) in pts.iter().zip(m) {
                    updated[j].1 = *p;
                }
                tracked = updated;
                u = next;
                let (i, j, d) = closest_pair(&tracked);
                if d < COLLISION {
                    return Ok(finish(u, label_pair(&tracked, i, j)));
                }
                h = 1.0 / n_steps as f64;
            }
            2 | 3 => {
                // a pair met inside (u, next]: refine until the step is tiny
                if h > MIN_STEP {
                    h /= 2.0;
                    continue;
                }
                let survivors: Vec<(f64, f64)> = if pts.len() == 3 {
                    b.points
                        .iter()
                        .filter(|p| p.multiplicity == 1)
                        .map(|p| (p.t, p.x))
                        .collect()
                } else {
                    pts
                };
                let m = nearest_matching(&tracked, &survivors).ok_or(Error::RefineStep(h))?;
                let gone: Vec<usize> = (0..4).filter(|j| !m.contains(j)).collect();
                if gone.len() != 2 {
                    return Err(Error::RefineStep(h));
                }
                return Ok(finish(next, label_pair(&tracked, gone[0], gone[1])));
            }
            _ => {
                h /= 2.0;
                if h < MIN_STEP {
                    return Err(Error::RefineStep(h));
                }
            }
        }
    }
    Err(Error::ParamOutOfRange {
        name: "path".into(),
        detail: "no collision before the end of the path".into(),
    })
}

/// Collisions along the canonical paths, traced in parallel.
pub fn canonical_collisions(n_steps: usize) -> Vec<(String, Result<Collision>)> {
    canonical_paths()
        .par_iter()
        .map(|(name, p)| (name.to_string(), trace_collision(2.0, p, n_steps)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn four_points_at_k1() {
        let b = branch_points(2.0, [-0.5, 0.0]);
        assert_eq!(b.points.len(), 4);
        let h = 0.5f64.sqrt();
        let expect = [(-1.0 - h, 0.0), (-1.0 + h, 0.0), (0.0, -h), (0.0, h)];
        for (p, e) in b.points.iter().zip(expect) {
            assert!(close(p.t, e.0) && close(p.x, e.1), "{p:?} vs {e:?}");
        }
        assert_eq!(
            fiber_type(2.0, [-0.5, 0.0]),
            FiberType::DoublyPuncturedTorus
        );
    }

    #[test]
    fn two_points_at_k3() {
        let b = branch_points(2.0, [-1.5, 0.0]);
        assert_eq!(b.points.len(), 2);
        assert!(close(b.points[1].x, 1.5f64.sqrt()));
        assert_eq!(fiber_type(2.0, [-1.5, 0.0]), FiberType::Cylinder);
    }

    #[test]
    fn double_root_at_k2() {
        let b = branch_points(2.0, [-1.0, 0.0]);
        assert_eq!(b.points.len(), 3);
        assert_eq!(b.points.iter().filter(|p| p.multiplicity == 2).count(), 1);
        assert_eq!(fiber_type(2.0, [-1.0, 0.0]), FiberType::Transitional);
    }

    #[test]
    fn off_axis_points_polished() {
        for w in [[-0.5, 0.3], [-0.2, -0.1], [1.0, 2.0], [-0.5, 1e-7]] {
            let b = branch_points(2.0, w);
            assert!(b.max_residual() < 1e-12);
            assert!(b.points.len() == 2 || b.points.len() == 4);
        }
    }

    #[test]
    fn quartic_roots() {
        // (x-1)(x+2)(x^2+1) = x^4 + x^3 - x^2 + x - 2
        let r = quartic_real_roots(1.0, -1.0, 1.0, -2.0);
        assert_eq!(r.len(), 2);
        assert!(close(r[0], -2.0) && close(r[1], 1.0));
    }

    #[test]
    fn real_path_pairs_the_axis_points() {
        let c = trace_collision(2.0, &canonical_paths()[0].1, 400).unwrap();
        assert_eq!(c.pair, (0, 1));
        assert!((c.param - 0.5).abs() < 1e-6);
    }

    #[test]
    fn three_distinct_pairs_stable_under_halving() {
        let a: Vec<_> = canonical_collisions(200)
            .into_iter()
            .map(|(_, c)| c.unwrap().pair)
            .collect();
        let b: Vec<_> = canonical_collisions(400)
            .into_iter()
            .map(|(_, c)| c.unwrap().pair)
            .collect();
        assert_eq!(a, b);
        assert!(a[0] != a[1] && a[1] != a[2] && a[0] != a[2], "{a:?}");
    }
}
