//! Cusp counts under reparametrization and the branch count of the
//! wrinkle's fibre cover against its critical-value curve.

use std::f64::consts::TAU;

use proptest::prelude::*;
use wrinkle_core::cover::branch_points;
use wrinkle_core::models::{get_model, params_from_pairs, ModelId};
use wrinkle_core::singular::{count_cusps_curve, critical_values, ImageCurve, PlaneCurve};

/// `curve` composed with a monotone self-map of its domain.
struct Reparam<'a> {
    curve: &'a dyn PlaneCurve,
    wiggle: f64,
    phase: f64,
}

impl Reparam<'_> {
    fn warp(&self, v: f64) -> (f64, f64) {
        let (lo, hi) = self.curve.domain();
        let x = (v - lo) / (hi - lo);
        let g = x + self.wiggle * ((TAU * x + self.phase).sin() - self.phase.sin()) / TAU;
        let dg = 1.0 + self.wiggle * (TAU * x + self.phase).cos();
        (lo + (hi - lo) * g, dg)
    }
}

impl PlaneCurve for Reparam<'_> {
    fn point(&self, v: f64) -> [f64; 2] {
        self.curve.point(self.warp(v).0)
    }
    fn velocity(&self, v: f64) -> [f64; 2] {
        let (u, dg) = self.warp(v);
        self.curve.velocity(u).map(|c| c * dg)
    }
    fn domain(&self) -> (f64, f64) {
        self.curve.domain()
    }
    fn periodic(&self) -> bool {
        self.curve.periodic()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cusp_count_survives_reparametrization(wiggle in -0.8f64..0.8, phase in 0.0f64..TAU, which in 0usize..3) {
        let (id, s, n) = [(ModelId::Wrinkling, "1", 3), (ModelId::Birth, "1", 2), (ModelId::Flipping, "1/2", 2)][which];
        let m = get_model(id, &params_from_pairs(&[("s", s)]).unwrap()).unwrap();
        let set = m.critical_set.clone().unwrap();
        let total: usize = (0..set.pieces())
            .map(|piece| {
                let c = ImageCurve::new(&m, set.clone(), piece);
                let r = Reparam { curve: &c, wiggle, phase };
                count_cusps_curve(&r).unwrap()
            })
            .sum();
        prop_assert_eq!(total, n);
    }
}

fn wrinkle_outline() -> Vec<[f64; 2]> {
    let m = get_model(
        ModelId::Wrinkling,
        &params_from_pairs(&[("s", "2")]).unwrap(),
    )
    .unwrap();
    critical_values(&m, 4000)
        .unwrap()
        .into_iter()
        .map(|c| c.value)
        .collect()
}

/// Even-odd rule against the closed sampled outline.
fn inside(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let mut c = false;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                c = !c;
            }
        }
    }
    c
}

fn distance(poly: &[[f64; 2]], p: [f64; 2]) -> f64 {
    poly.iter()
        .map(|q| ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn branch_count_follows_the_outline() {
    let outline = wrinkle_outline();
    let mut rng = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        (rng >> 11) as f64 / (1u64 << 53) as f64
    };
    let (mut n_in, mut n_out) = (0, 0);
    while n_in + n_out < 1000 {
        let w = [-1.4 + 1.6 * next(), -0.8 + 1.6 * next()];
        if distance(&outline, w) < 0.02 {
            continue;
        }
        let b = branch_points(2.0, w);
        let want = if inside(&outline, w) { 4 } else { 2 };
        assert_eq!(b.points.len(), want, "at {w:?}");
        assert!(
            b.max_residual() < 1e-12,
            "residual {} at {w:?}",
            b.max_residual()
        );
        if want == 4 {
            n_in += 1;
        } else {
            n_out += 1;
        }
    }
    assert!(n_in > 100 && n_out > 100, "{n_in} inside, {n_out} outside");
}
