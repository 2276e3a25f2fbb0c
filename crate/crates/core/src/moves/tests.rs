use std::collections::BTreeSet;

use super::checks::{facing_folds, new_ids};
use super::*;
use crate::diagram::isomorphic;

fn point(id: &str, region: &str, cycle: &str, chirality: Chirality) -> LefschetzPoint {
    LefschetzPoint {
        id: id.into(),
        region: region.into(),
        cycle: cycle.into(),
        chirality,
        position: 0,
    }
}

fn with_point(genus: u32, chirality: Chirality) -> FibrationDiagram {
    let mut d = FibrationDiagram::trivial(genus);
    d.cycles.surfaces.insert("t".into(), SurfaceModel::torus());
    d.cycles.add_cycle("a", "t", CycleClass(vec![1, 0]));
    d.lefschetz.push(point("p", "r0", "a", chirality));
    d
}

fn new_region(before: &FibrationDiagram, after: &FibrationDiagram) -> String {
    let fresh = new_ids(before, after);
    after
        .regions
        .iter()
        .find(|r| fresh.contains(r.id.as_str()))
        .expect("a new region")
        .id
        .clone()
}

#[test]
fn builtins_reach_their_targets() {
    let scripts: Vec<MoveScript> = BUILTIN_SCRIPTS
        .iter()
        .map(|n| builtin_script(n).unwrap())
        .collect();
    for (s, out) in scripts.iter().zip(run_scripts(&scripts)) {
        let out = out.unwrap_or_else(|e| panic!("{}: {e}", s.name));
        assert_eq!(out.matches_expected, Some(true), "{}", s.name);
        assert_eq!(out.trace.len(), s.steps.len());
        assert!(validate(&out.final_diagram).is_empty());
        assert!(!s.note.is_empty());
    }
    assert!(builtin_script("nope").is_err());
}

#[test]
fn builtin_targets_are_discriminating() {
    let outcomes: Vec<(MoveScript, ScriptOutcome)> = BUILTIN_SCRIPTS
        .iter()
        .map(|n| {
            let s = builtin_script(n).unwrap();
            let o = run_script(&s).unwrap();
            (s, o)
        })
        .collect();
    for (i, (_, oi)) in outcomes.iter().enumerate() {
        for (j, (sj, _)) in outcomes.iter().enumerate() {
            let e = sj.expected.as_ref().unwrap();
            assert_eq!(isomorphic(&oi.final_diagram, e), i == j);
        }
    }
    // Perturbing one fibre or one cycle breaks each match.
    for (s, o) in &outcomes {
        let mut e = s.expected.clone().unwrap();
        e.regions[0].fiber[0] += 1;
        assert!(!isomorphic(&o.final_diagram, &e), "{}", s.name);
        let mut e = s.expected.clone().unwrap();
        for g in &mut e.cycles.geometric {
            g.count += 1;
        }
        assert!(!isomorphic(&o.final_diagram, &e), "{}", s.name);
    }
}

#[test]
fn fig8_result_smooths_back_to_its_start() {
    let s = builtin_script("fig8").unwrap();
    let out = run_script(&s).unwrap();
    let d = out.final_diagram;
    assert_eq!(d.cusps.len(), 1);
    let k = d.cusps[0].id.clone();
    let smoothed = apply_move(&d, &MoveSpec::new(MoveKind::CuspSmoothing, &[&k])).unwrap();
    assert!(isomorphic(&smoothed, &s.initial));
    // A cusp and its smoothing are different diagrams.
    assert!(!isomorphic(&d, &s.initial));
}

#[test]
fn thm61_joins_the_two_circles() {
    let s = builtin_script("thm61").unwrap();
    let before = s.initial.counts();
    let after = run_script(&s).unwrap().final_diagram.counts();
    assert_eq!(before.closed_curves, 2);
    assert_eq!(after.closed_curves, 1);
    assert_eq!((after.cusps, after.crossings), (2, 2));
}

#[test]
fn connectedness_leaves_only_connected_fibres() {
    let s = builtin_script("connectedness").unwrap();
    assert!(s.initial.regions.iter().any(|r| r.fiber.len() > 1));
    let d = run_script(&s).unwrap().final_diagram;
    assert!(d.regions.iter().all(|r| r.fiber.len() == 1));
}

fn removal(chirality: Chirality) -> FibrationDiagram {
    let (wr, sm) = match chirality {
        Chirality::Standard => (MoveKind::Wrinkling, MoveKind::CuspSmoothing),
        Chirality::Achiral => (MoveKind::AchiralWrinkling, MoveKind::AchiralCuspSmoothing),
    };
    let mut d = with_point(1, chirality);
    d = apply_move(&d, &MoveSpec::new(wr, &["p"])).unwrap();
    for k in ["k1", "k2", "k3"] {
        d = apply_move(&d, &MoveSpec::new(sm, &[k])).unwrap();
    }
    d
}

#[test]
fn circle_parities() {
    let even = removal(Chirality::Achiral);
    let circle = even.arcs.iter().find(|a| a.is_closed()).unwrap().id.clone();
    assert_eq!(
        circle_parity(&even, &circle).unwrap(),
        MonodromyParity::Even
    );
    let classes: BTreeSet<Vec<i64>> = even
        .lefschetz
        .iter()
        .map(|p| even.cycles.cycles[&p.cycle].class.0.clone())
        .collect();
    let want: BTreeSet<Vec<i64>> = [vec![1, 1, 0], vec![0, 2, 1], vec![-1, 1, 1]].into();
    assert_eq!(classes, want);
    assert!(even
        .lefschetz
        .iter()
        .all(|p| p.chirality == Chirality::Achiral));

    let odd = removal(Chirality::Standard);
    let circle = odd.arcs.iter().find(|a| a.is_closed()).unwrap().id.clone();
    assert_eq!(circle_parity(&odd, &circle).unwrap(), MonodromyParity::Odd);

    let script = builtin_script("achiral_removal").unwrap();
    assert!(isomorphic(
        &even,
        &run_script(&script).unwrap().final_diagram
    ));
}

#[test]
fn parity_needs_a_closed_circle_with_points() {
    let d = with_point(1, Chirality::Standard);
    assert!(circle_parity(&d, "nope").is_err());
    let born = apply_move(
        &FibrationDiagram::trivial(1),
        &MoveSpec::new(MoveKind::Birth, &["r0"]),
    )
    .unwrap();
    let arc = born.arcs[0].id.clone();
    assert!(circle_parity(&born, &arc).is_err());
}

fn delta(a: CellCounts, b: CellCounts) -> [i64; 5] {
    let f = |c: CellCounts| {
        [
            c.cusps,
            c.lefschetz,
            c.closed_curves,
            c.crossings,
            c.regions,
        ]
    };
    let (x, y) = (f(a), f(b));
    std::array::from_fn(|i| y[i] as i64 - x[i] as i64)
}

#[test]
fn cell_bookkeeping() {
    let d = with_point(1, Chirality::Standard);
    let w = apply_move(&d, &MoveSpec::new(MoveKind::Wrinkling, &["p"])).unwrap();
    assert_eq!(delta(d.counts(), w.counts()), [3, -1, 1, 0, 1]);
    let s = apply_move(&w, &MoveSpec::new(MoveKind::CuspSmoothing, &["k2"])).unwrap();
    assert_eq!(delta(w.counts(), s.counts()), [-1, 1, 0, 0, 0]);

    let t = FibrationDiagram::trivial(2);
    let b = apply_move(&t, &MoveSpec::new(MoveKind::Birth, &["r0"])).unwrap();
    assert_eq!(delta(t.counts(), b.counts()), [2, 0, 1, 0, 1]);
    assert_eq!(b.arcs.len(), 2);

    let arc = b.arcs[0].id.clone();
    let f = apply_move(&b, &MoveSpec::new(MoveKind::Flipping, &[&arc])).unwrap();
    assert_eq!(delta(b.counts(), f.counts()), [2, 0, 0, 1, 1]);

    let st = facing_folds(vec![1], vec![2], false);
    let m = apply_move(
        &st,
        &MoveSpec::new(MoveKind::Merging, &["top", "bottom"]).split(&[]),
    )
    .unwrap();
    assert_eq!(delta(st.counts(), m.counts()), [2, 0, 0, 0, 0]);
}

#[test]
fn birth_raises_inner_genus() {
    let d = FibrationDiagram::trivial(1);
    let b = apply_move(&d, &MoveSpec::new(MoveKind::Birth, &["r0"])).unwrap();
    assert!(validate(&b).is_empty());
    let inner = new_region(&d, &b);
    assert_eq!(b.region(&inner).unwrap().fiber, vec![2]);
    let (u, l) = (&b.arcs[0].cycle, &b.arcs[1].cycle);
    assert_eq!(b.cycles.geometric(u, l), Some(1));
}

#[test]
fn smoothing_vanishes_along_the_difference() {
    let d = with_point(1, Chirality::Standard);
    let w = apply_move(&d, &MoveSpec::new(MoveKind::Wrinkling, &["p"])).unwrap();
    let s = apply_move(
        &w,
        &MoveSpec::new(MoveKind::CuspSmoothing, &["k1"]).cycle("vanishing", "v"),
    )
    .unwrap();
    // k1 joins a and b.
    assert_eq!(s.cycles.cycles["v"].class, CycleClass(vec![1, -1, 0]));
    let p = s.lefschetz.iter().find(|p| p.cycle == "v").unwrap();
    assert_eq!(p.chirality, Chirality::Standard);

    let a = apply_move(
        &w,
        &MoveSpec::new(MoveKind::AchiralCuspSmoothing, &["k1"]).cycle("vanishing", "v"),
    )
    .unwrap();
    assert_eq!(a.cycles.cycles["v"].class, CycleClass(vec![1, 1, 0]));
}

#[test]
fn wrinkling_creates_pairwise_transverse_cycles() {
    let d = with_point(1, Chirality::Standard);
    let w = apply_move(
        &d,
        &MoveSpec::new(MoveKind::Wrinkling, &["p"])
            .cycle("first", "a1")
            .cycle("second", "b1")
            .cycle("third", "d1"),
    )
    .unwrap();
    let cfg = &w.cycles;
    assert_eq!(cfg.cycles["a1"].class, CycleClass(vec![1, 0, 0]));
    assert_eq!(cfg.cycles["b1"].class, CycleClass(vec![0, 1, 0]));
    assert_eq!(cfg.cycles["d1"].class, CycleClass(vec![0, 1, 1]));
    for (x, y) in [("a1", "b1"), ("b1", "d1"), ("d1", "a1")] {
        assert_eq!(cfg.geometric(x, y), Some(1));
        assert_eq!(cfg.pairing(x, y).map(i64::abs), Some(1));
    }
    assert!(w.lefschetz.is_empty());
}

#[test]
fn flip_cusps_smooth_to_sum_and_difference() {
    let b = apply_move(
        &FibrationDiagram::trivial(1),
        &MoveSpec::new(MoveKind::Birth, &["r0"]),
    )
    .unwrap();
    let arc = b.arcs[0].id.clone();
    let f = apply_move(&b, &MoveSpec::new(MoveKind::Flipping, &[&arc])).unwrap();
    let fresh = new_ids(&b, &f);
    let mut ks: Vec<&Cusp> = f
        .cusps
        .iter()
        .filter(|c| fresh.contains(c.id.as_str()))
        .collect();
    ks.sort_by_key(|c| c.position);
    let mut got = Vec::new();
    for k in ks {
        let s = apply_move(
            &f,
            &MoveSpec::new(MoveKind::CuspSmoothing, &[&k.id]).cycle("vanishing", "v"),
        )
        .unwrap();
        got.push(s.cycles.cycles["v"].class.clone());
    }
    // left + up, then right - up
    assert_eq!(
        got,
        vec![CycleClass(vec![1, 1, 0]), CycleClass(vec![0, -1, 1])]
    );
}

#[test]
fn chirality_guards() {
    let d = with_point(1, Chirality::Achiral);
    let m = MoveSpec::new(MoveKind::Wrinkling, &["p"]);
    assert!(check_precondition(&d, &m).unwrap().contains("Achiral"));
    assert!(matches!(
        apply_move(&d, &m),
        Err(Error::MoveRejected { step: 0, .. })
    ));
    let d = with_point(1, Chirality::Standard);
    assert!(check_precondition(&d, &MoveSpec::new(MoveKind::AchiralWrinkling, &["p"])).is_some());
    assert!(check_precondition(&d, &m).is_none());
}

#[test]
fn merging_preconditions() {
    let st = facing_folds(vec![1], vec![2], false);
    assert!(
        check_precondition(&st, &MoveSpec::new(MoveKind::Merging, &["top", "bottom"])).is_none()
    );
    let mut far = st.clone();
    far.cycles.set_geometric("c1", "c2", 0);
    assert!(
        check_precondition(&far, &MoveSpec::new(MoveKind::Merging, &["top", "bottom"])).is_some()
    );
    assert!(check_precondition(&st, &MoveSpec::new(MoveKind::Merging, &["top", "top"])).is_some());
}

#[test]
fn inverse_merging_needs_a_connected_middle() {
    let st = facing_folds(vec![1, 1], vec![2], true);
    assert!(validate(&st).is_empty(), "{:?}", validate(&st));
    let m = apply_move(
        &st,
        &MoveSpec::new(MoveKind::Merging, &["top", "bottom"]).split(&[]),
    )
    .unwrap();
    let ks: Vec<String> = m.cusps.iter().map(|c| c.id.clone()).collect();
    let kw = m
        .cusps
        .iter()
        .find(|c| c.cycles[0] == "c2")
        .unwrap()
        .id
        .clone();
    let ke = ks.iter().find(|k| **k != kw).unwrap().clone();
    let why = check_precondition(&m, &MoveSpec::new(MoveKind::InverseMerging, &[&kw, &ke]))
        .expect("rejected");
    assert!(why.contains("disconnected"), "{why}");

    let ok = facing_folds(vec![1], vec![2], false);
    let m = apply_move(
        &ok,
        &MoveSpec::new(MoveKind::Merging, &["top", "bottom"]).split(&[]),
    )
    .unwrap();
    let kw = m
        .cusps
        .iter()
        .find(|c| c.cycles[0] == "c2")
        .unwrap()
        .id
        .clone();
    let ke = m
        .cusps
        .iter()
        .find(|c| c.cycles[0] == "c1")
        .unwrap()
        .id
        .clone();
    assert!(
        check_precondition(&m, &MoveSpec::new(MoveKind::InverseMerging, &[&kw, &ke])).is_none()
    );
}

#[test]
fn scripts_report_the_failing_step() {
    let script = MoveScript {
        name: "bad".into(),
        note: String::new(),
        initial: with_point(1, Chirality::Standard),
        steps: vec![
            MoveSpec::new(MoveKind::Wrinkling, &["p"]),
            MoveSpec::new(MoveKind::Wrinkling, &["p"]),
        ],
        expected: None,
    };
    match run_script(&script) {
        Err(Error::MoveRejected { step, .. }) => assert_eq!(step, 1),
        other => panic!("{other:?}"),
    }
    let mut bad = FibrationDiagram::trivial(1);
    bad.regions[0].fiber.clear();
    assert!(check_precondition(&bad, &MoveSpec::new(MoveKind::Birth, &["r0"])).is_some());
}

#[test]
fn move_kinds_round_trip_through_text_and_json() {
    for k in MoveKind::ALL {
        assert_eq!(k.name().parse::<MoveKind>().unwrap(), k);
    }
    assert!("twist".parse::<MoveKind>().is_err());
    let s = builtin_script("fig8").unwrap();
    let back: MoveScript = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
    assert_eq!(back, s);
}
