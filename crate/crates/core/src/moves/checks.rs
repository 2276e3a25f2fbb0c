//! Seeded move/inverse round trips and cell-count bookkeeping, shared by the
//! unit tests and the acceptance suite.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{apply_move, MoveKind, MoveSpec};
use crate::diagram::{
    isomorphic, validate, CellCounts, End, FibrationDiagram, FoldArc, LefschetzPoint, Region,
};
use crate::homology::{CycleClass, SurfaceModel};
use crate::models::Chirality;

type Trial = std::result::Result<(), String>;

fn step(d: &FibrationDiagram, m: &MoveSpec) -> std::result::Result<FibrationDiagram, String> {
    apply_move(d, m).map_err(|e| e.to_string())
}

fn standard_point(id: &str, region: &str, cycle: &str) -> LefschetzPoint {
    LefschetzPoint {
        id: id.into(),
        region: region.into(),
        cycle: cycle.into(),
        chirality: Chirality::Standard,
        position: 0,
    }
}

/// Ids present in `after` but not in `before`.
pub fn new_ids<'a>(before: &FibrationDiagram, after: &'a FibrationDiagram) -> BTreeSet<&'a str> {
    let old: BTreeSet<&str> = before.all_ids().collect();
    after.all_ids().filter(|i| !old.contains(i)).collect()
}

fn new_region(
    before: &FibrationDiagram,
    after: &FibrationDiagram,
) -> std::result::Result<String, String> {
    let fresh = new_ids(before, after);
    after
        .regions
        .iter()
        .find(|r| fresh.contains(r.id.as_str()))
        .map(|r| r.id.clone())
        .ok_or_else(|| "no new region".to_string())
}

/// Two folds facing each other across a strip of genus one higher, each
/// running boundary to boundary; their cycles meet once.
pub fn facing_folds(low: Vec<u32>, middle: Vec<u32>, separating: bool) -> FibrationDiagram {
    let mut d = FibrationDiagram::trivial(1);
    d.name = "facing folds".into();
    d.regions = vec![
        Region {
            id: "up".into(),
            fiber: low.clone(),
        },
        Region {
            id: "mid".into(),
            fiber: middle,
        },
        Region {
            id: "down".into(),
            fiber: low,
        },
    ];
    d.cycles.surfaces.insert("t".into(), SurfaceModel::torus());
    d.cycles.add_cycle("c1", "t", CycleClass(vec![1, 0]));
    d.cycles.add_cycle("c2", "t", CycleClass(vec![0, 1]));
    d.cycles.set_geometric("c1", "c2", 1);
    for (id, low, cycle) in [("top", "up", "c1"), ("bottom", "down", "c2")] {
        d.arcs.push(FoldArc {
            id: id.into(),
            ends: Some([End::Boundary, End::Boundary]),
            high: "mid".into(),
            low: low.into(),
            cycle: cycle.into(),
            separating,
        });
    }
    d
}

/// A trivial diagram with standard points, roughened by random births,
/// wrinklings and flips.
pub fn random_base(rng: &mut ChaCha8Rng) -> FibrationDiagram {
    let mut d = FibrationDiagram::trivial(rng.gen_range(1..=3));
    d.cycles.surfaces.insert("t".into(), SurfaceModel::torus());
    let classes = [[1, 0], [0, 1], [1, 1], [1, -1]];
    for i in 0..rng.gen_range(2..=3) {
        let c = format!("v{i}");
        d.cycles
            .add_cycle(&c, "t", CycleClass(classes[rng.gen_range(0..4)].to_vec()));
        d.lefschetz.push(standard_point(&format!("q{i}"), "r0", &c));
    }
    for _ in 0..rng.gen_range(0..=3) {
        let m = match rng.gen_range(0..3) {
            0 => {
                let r = d.regions.choose(rng).expect("a region").id.clone();
                MoveSpec::new(MoveKind::Birth, &[&r])
            }
            1 if d.lefschetz.len() > 1 => {
                let p = d.lefschetz.choose(rng).expect("a point").id.clone();
                MoveSpec::new(MoveKind::Wrinkling, &[&p])
            }
            _ if !d.arcs.is_empty() => {
                let a = d.arcs.choose(rng).expect("an arc").id.clone();
                MoveSpec::new(MoveKind::Flipping, &[&a])
            }
            _ => continue,
        };
        if let Ok(next) = apply_move(&d, &m) {
            d = next;
        }
    }
    d
}

fn same(back: &FibrationDiagram, d: &FibrationDiagram) -> Trial {
    if isomorphic(back, d) {
        Ok(())
    } else {
        Err("inverse did not restore the diagram".into())
    }
}

fn birth_trial(rng: &mut ChaCha8Rng) -> Trial {
    let d = random_base(rng);
    let r = d.regions.choose(rng).ok_or("no region")?.id.clone();
    let b = step(&d, &MoveSpec::new(MoveKind::Birth, &[&r]))?;
    let inner = new_region(&d, &b)?;
    if isomorphic(&b, &d) {
        return Err("birth left the diagram unchanged".into());
    }
    let back = step(&b, &MoveSpec::new(MoveKind::InverseBirth, &[&inner]))?;
    same(&back, &d)
}

fn wrinkling_trial(rng: &mut ChaCha8Rng) -> Trial {
    let d = random_base(rng);
    let pts: Vec<&LefschetzPoint> = d
        .lefschetz
        .iter()
        .filter(|p| p.chirality == Chirality::Standard)
        .collect();
    let p = *pts.choose(rng).ok_or("no standard point")?;
    let w = step(&d, &MoveSpec::new(MoveKind::Wrinkling, &[&p.id]))?;
    let inner = new_region(&d, &w)?;
    let inv = MoveSpec::new(MoveKind::InverseWrinkling, &[&inner]).cycle("vanishing", &p.cycle);
    same(&step(&w, &inv)?, &d)
}

fn flipping_trial(rng: &mut ChaCha8Rng) -> Trial {
    let mut d = random_base(rng);
    if d.arcs.is_empty() {
        d = step(&d, &MoveSpec::new(MoveKind::Birth, &["r0"]))?;
    }
    let a = d.arcs.choose(rng).ok_or("no arc")?.id.clone();
    let f = step(&d, &MoveSpec::new(MoveKind::Flipping, &[&a]))?;
    let fresh = new_ids(&d, &f);
    let mut ks: Vec<_> = f
        .cusps
        .iter()
        .filter(|c| fresh.contains(c.id.as_str()))
        .collect();
    ks.sort_by_key(|c| c.position);
    if ks.len() != 2 {
        return Err(format!("flip created {} cusps", ks.len()));
    }
    let inv = MoveSpec::new(MoveKind::InverseFlipping, &[&ks[0].id, &ks[1].id]);
    same(&step(&f, &inv)?, &d)
}

fn merging_trial(rng: &mut ChaCha8Rng) -> Trial {
    let g = rng.gen_range(1..=3);
    let mut d = facing_folds(vec![g], vec![g + 1], false);
    let mut n = 0;
    for r in ["up", "mid", "down"] {
        for _ in 0..rng.gen_range(0..=2) {
            let c = format!("w{n}");
            d.cycles.add_cycle(&c, "t", CycleClass(vec![1, n]));
            d.lefschetz.push(standard_point(&format!("q{n}"), r, &c));
            n += 1;
        }
    }
    for r in ["up", "down"] {
        if rng.gen_bool(0.5) {
            d = step(&d, &MoveSpec::new(MoveKind::Birth, &[r]))?;
        }
    }
    let east: Vec<&str> = d
        .lefschetz
        .iter()
        .filter(|p| p.region == "mid" && rng.gen_bool(0.5))
        .map(|p| p.id.as_str())
        .collect();
    let m = step(
        &d,
        &MoveSpec::new(MoveKind::Merging, &["top", "bottom"]).split(&east),
    )?;
    let below: Vec<&str> = d
        .arcs
        .iter()
        .filter(|a| a.id != "bottom" && (a.high == "down" || a.low == "down"))
        .map(|a| a.id.as_str())
        .chain(
            d.lefschetz
                .iter()
                .filter(|p| p.region == "down")
                .map(|p| p.id.as_str()),
        )
        .collect();
    let cusp = |first: &str| {
        m.cusps
            .iter()
            .find(|c| c.cycles[0] == first)
            .map(|c| c.id.clone())
            .ok_or_else(|| format!("no cusp starting on {first}"))
    };
    let (kw, ke) = (cusp("c2")?, cusp("c1")?);
    let inv = MoveSpec::new(MoveKind::InverseMerging, &[&kw, &ke]).split(&below);
    same(&step(&m, &inv)?, &d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub pair: String,
    pub seed: u64,
    pub ok: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

pub const ROUND_TRIP_PAIRS: [&str; 4] = [
    "birth/inverse_birth",
    "wrinkling/inverse_wrinkling",
    "flipping/inverse_flipping",
    "merging/inverse_merging",
];

/// Every move/inverse pair on one random site per seed.
pub fn round_trip_trials(seeds: std::ops::Range<u64>) -> Vec<TrialOutcome> {
    let seeds: Vec<u64> = seeds.collect();
    seeds
        .par_iter()
        .flat_map_iter(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let trials: [fn(&mut ChaCha8Rng) -> Trial; 4] =
                [birth_trial, wrinkling_trial, flipping_trial, merging_trial];
            trials
                .into_iter()
                .zip(ROUND_TRIP_PAIRS)
                .map(|(t, pair)| {
                    let r = t(&mut rng);
                    TrialOutcome {
                        pair: pair.into(),
                        seed,
                        ok: r.is_ok(),
                        detail: r.err().unwrap_or_default(),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaCheck {
    pub mv: String,
    pub expected: BTreeMap<String, i64>,
    pub actual: BTreeMap<String, i64>,
    pub holds: bool,
}

fn count_delta(a: &CellCounts, b: &CellCounts) -> BTreeMap<String, i64> {
    let f = |c: &CellCounts| {
        [
            ("cusps", c.cusps),
            ("lefschetz", c.lefschetz),
            ("closed_curves", c.closed_curves),
            ("crossings", c.crossings),
            ("regions", c.regions),
        ]
    };
    f(a).iter()
        .zip(f(b))
        .map(|((k, x), (_, y))| (k.to_string(), y as i64 - *x as i64))
        .collect()
}

fn delta_check(
    mv: &str,
    before: &FibrationDiagram,
    after: &FibrationDiagram,
    expected: &[(&str, i64)],
) -> DeltaCheck {
    let actual = count_delta(&before.counts(), &after.counts());
    let expected: BTreeMap<String, i64> = actual
        .keys()
        .map(|k| {
            let v = expected.iter().find(|(n, _)| n == k).map_or(0, |(_, v)| *v);
            (k.clone(), v)
        })
        .collect();
    let holds = expected == actual && validate(after).is_empty();
    DeltaCheck {
        mv: mv.into(),
        expected,
        actual,
        holds,
    }
}

/// Cell-count changes of each move on a small representative diagram.
pub fn bookkeeping_checks() -> crate::error::Result<Vec<DeltaCheck>> {
    let mut d = FibrationDiagram::trivial(1);
    d.cycles.surfaces.insert("t".into(), SurfaceModel::torus());
    d.cycles.add_cycle("a", "t", CycleClass(vec![1, 0]));
    d.lefschetz.push(standard_point("p", "r0", "a"));
    let mut out = Vec::new();

    let w = apply_move(&d, &MoveSpec::new(MoveKind::Wrinkling, &["p"]))?;
    out.push(delta_check(
        "wrinkling",
        &d,
        &w,
        &[
            ("cusps", 3),
            ("lefschetz", -1),
            ("closed_curves", 1),
            ("regions", 1),
        ],
    ));
    let k = w.cusps[0].id.clone();
    let s = apply_move(&w, &MoveSpec::new(MoveKind::CuspSmoothing, &[&k]))?;
    out.push(delta_check(
        "cusp_smoothing",
        &w,
        &s,
        &[("cusps", -1), ("lefschetz", 1)],
    ));
    let s = apply_move(&w, &MoveSpec::new(MoveKind::AchiralCuspSmoothing, &[&k]))?;
    out.push(delta_check(
        "achiral_cusp_smoothing",
        &w,
        &s,
        &[("cusps", -1), ("lefschetz", 1)],
    ));

    let t = FibrationDiagram::trivial(1);
    let b = apply_move(&t, &MoveSpec::new(MoveKind::Birth, &["r0"]))?;
    out.push(delta_check(
        "birth",
        &t,
        &b,
        &[("cusps", 2), ("closed_curves", 1), ("regions", 1)],
    ));
    let arc = b.arcs[0].id.clone();
    let f = apply_move(&b, &MoveSpec::new(MoveKind::Flipping, &[&arc]))?;
    out.push(delta_check(
        "flipping",
        &b,
        &f,
        &[("cusps", 2), ("crossings", 1), ("regions", 1)],
    ));

    let st = facing_folds(vec![1], vec![2], false);
    let m = apply_move(
        &st,
        &MoveSpec::new(MoveKind::Merging, &["top", "bottom"]).split(&[]),
    )?;
    out.push(delta_check("merging", &st, &m, &[("cusps", 2)]));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_seeds_round_trip() {
        let out = round_trip_trials(0..20);
        assert_eq!(out.len(), 80);
        for t in &out {
            assert!(t.ok, "{t:?}");
        }
        assert_eq!(out, round_trip_trials(0..20));
    }

    #[test]
    fn bookkeeping_holds() {
        for c in bookkeeping_checks().unwrap() {
            assert!(c.holds, "{c:?}");
        }
    }

    #[test]
    fn random_bases_validate() {
        for seed in 100..120u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            assert!(validate(&random_base(&mut rng)).is_empty());
        }
    }
}
