//! Twists on homology, diagram validation and isomorphism, move outputs
//! and round trips, and jet rank under rescaling.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wrinkle_core::diagram::{isomorphic, validate, FibrationDiagram, LefschetzPoint};
use wrinkle_core::homology::{CycleClass, SurfaceModel};
use wrinkle_core::jetstab::{tangent_space, Family};
use wrinkle_core::models::Chirality;
use wrinkle_core::moves::checks::{random_base, round_trip_trials};
use wrinkle_core::moves::{
    apply_move, builtin_script, run_script, MoveKind, MoveSpec, BUILTIN_SCRIPTS,
};
use wrinkle_core::symcalc::rat;

fn class(rank: usize) -> impl Strategy<Value = CycleClass> {
    prop::collection::vec(-6i64..=6, rank).prop_map(CycleClass)
}

fn surfaces() -> [SurfaceModel; 2] {
    [SurfaceModel::torus(), SurfaceModel::torus2p()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn twists_preserve_the_pairing(which in 0usize..2, c in class(3), u in class(3), v in class(3), power in prop::sample::select(vec![1i32, -1])) {
        let s = &surfaces()[which];
        let r = s.rank();
        let (c, u, v) = (CycleClass(c.0[..r].to_vec()), CycleClass(u.0[..r].to_vec()), CycleClass(v.0[..r].to_vec()));
        let tu = s.dehn_twist(&c, &u, power).unwrap();
        let tv = s.dehn_twist(&c, &v, power).unwrap();
        prop_assert_eq!(s.pairing(&tu, &tv).unwrap(), s.pairing(&u, &v).unwrap());
    }

    #[test]
    fn twist_and_inverse_cancel(c in class(3), u in class(3)) {
        let s = SurfaceModel::torus2p();
        let there = s.dehn_twist(&c, &u, 1).unwrap();
        prop_assert_eq!(s.dehn_twist(&c, &there, -1).unwrap(), u.clone());
        // the twisting curve itself is fixed
        prop_assert_eq!(s.dehn_twist(&c, &c, 1).unwrap(), c);
    }
}

fn corpus() -> Vec<FibrationDiagram> {
    let mut out: Vec<FibrationDiagram> = (0..12u64)
        .map(|s| random_base(&mut ChaCha8Rng::seed_from_u64(s)))
        .collect();
    for n in BUILTIN_SCRIPTS {
        let s = builtin_script(n).unwrap();
        out.push(run_script(&s).unwrap().final_diagram);
        out.push(s.initial);
    }
    out
}

#[test]
fn isomorphism_is_an_equivalence_on_the_corpus() {
    let c = corpus();
    let iso: Vec<Vec<bool>> = c
        .iter()
        .map(|a| c.iter().map(|b| isomorphic(a, b)).collect())
        .collect();
    for i in 0..c.len() {
        assert!(iso[i][i]);
        for j in 0..c.len() {
            assert_eq!(iso[i][j], iso[j][i]);
            for k in 0..c.len() {
                if iso[i][j] && iso[j][k] {
                    assert!(iso[i][k], "{i} ~ {j} ~ {k}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adding_a_clean_point_keeps_validation(seed in 0u64..10_000, corrupt in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = random_base(&mut rng);
        if corrupt {
            let r = rng.gen_range(0..d.regions.len());
            d.regions[r].fiber.push(7);
        }
        let before = validate(&d);
        let region = d.regions.choose(&mut rng).unwrap().id.clone();
        let mut e = d.clone();
        e.cycles.add_cycle("extra", "t", CycleClass(vec![1, 1]));
        e.lefschetz.push(LefschetzPoint {
            id: "extra_point".into(),
            region,
            cycle: "extra".into(),
            chirality: Chirality::Standard,
            position: 0,
        });
        let after = validate(&e);
        for v in &after {
            prop_assert!(before.contains(v), "new violation {}", v);
        }
        if !corrupt {
            prop_assert!(after.is_empty());
        }
    }

    #[test]
    fn every_accepted_move_validates(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = random_base(&mut rng);
        for _ in 0..6 {
            let kind = *[
                MoveKind::Birth,
                MoveKind::Wrinkling,
                MoveKind::Flipping,
                MoveKind::CuspSmoothing,
                MoveKind::InverseBirth,
            ]
            .choose(&mut rng)
            .unwrap();
            let site = match kind {
                MoveKind::Birth | MoveKind::InverseBirth => d.regions.choose(&mut rng).map(|r| r.id.clone()),
                MoveKind::Wrinkling => d.lefschetz.choose(&mut rng).map(|p| p.id.clone()),
                MoveKind::Flipping => d.arcs.choose(&mut rng).map(|a| a.id.clone()),
                _ => d.cusps.choose(&mut rng).map(|k| k.id.clone()),
            };
            let Some(site) = site else { continue };
            if let Ok(next) = apply_move(&d, &MoveSpec::new(kind, &[&site])) {
                prop_assert!(validate(&next).is_empty(), "{:?} at {} broke {:?}", kind, site, validate(&next));
                d = next;
            }
        }
    }

    #[test]
    fn random_sites_round_trip(seed in 1000u64..100_000) {
        for t in round_trip_trials(seed..seed + 1) {
            prop_assert!(t.ok, "{:?}", t);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// `t -> lambda t` takes the unfolding (a, b) to (a lambda^2, b lambda).
    #[test]
    fn jet_rank_survives_rescaling(fi in 0usize..3, a in -4i64..=4, b in -4i64..=4, ln in 1i64..=5, ld in 1i64..=4, neg in any::<bool>()) {
        let family = Family::ALL[fi];
        let l = rat(if neg { -ln } else { ln }, ld);
        let (a, b) = (rat(a, 1), rat(b, 1));
        let r0 = tangent_space(family, &a, &b).unwrap().rank;
        let r1 = tangent_space(family, &(&a * &l * &l), &(&b * &l)).unwrap().rank;
        prop_assert_eq!(r0, r1);
    }
}
