//! Exact properties of the polynomial and exterior calculus, the model
//! catalog and the form catalog.

use num::{BigRational, Zero};
use proptest::prelude::*;
use wrinkle_core::models::{get_form, get_model, FormId, ModelId, Params};
use wrinkle_core::singular::exact_locus_samples;
use wrinkle_core::symcalc::{
    coord_assignment, exterior_derivative, hodge_star, rat, volume_coefficient, wedge, Assignment,
    Form, Polynomial, Var,
};

/// Sum of up to six monomials of degree at most 3 in (t, x, y, z).
fn poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(
        (
            -6i64..=6,
            1i64..=4,
            [0u32..=2, 0u32..=2, 0u32..=1, 0u32..=1],
        ),
        0..6,
    )
    .prop_map(|terms| {
        terms
            .into_iter()
            .fold(Polynomial::zero(), |acc, (n, d, e)| {
                let m = Var::COORDS
                    .iter()
                    .zip(e)
                    .fold(Polynomial::constant(rat(n, d)), |m, (v, k)| {
                        &m * &Polynomial::var(*v).pow(k)
                    });
                &acc + &m
            })
    })
}

fn form(degree: usize) -> impl Strategy<Value = Form> {
    let n = [1, 4, 6, 4, 1][degree];
    prop::collection::vec(poly(), n).prop_map(move |c| Form::new(degree, c).unwrap())
}

fn point() -> impl Strategy<Value = [BigRational; 4]> {
    [
        (-9i64..=9, 1i64..=5),
        (-9i64..=9, 1i64..=5),
        (-9i64..=9, 1i64..=5),
        (-9i64..=9, 1i64..=5),
    ]
    .prop_map(|c| c.map(|(n, d)| rat(n, d)))
}

fn at(p: &[BigRational; 4]) -> Assignment {
    coord_assignment(p)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_squared_vanishes(f in form(1), g in form(0)) {
        prop_assert!(exterior_derivative(&exterior_derivative(&f).unwrap()).unwrap().is_zero());
        prop_assert!(exterior_derivative(&exterior_derivative(&g).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn evaluation_is_a_ring_map(p in poly(), q in poly(), x in point()) {
        let a = at(&x);
        let (pv, qv) = (p.eval(&a).unwrap(), q.eval(&a).unwrap());
        prop_assert_eq!((&p + &q).eval(&a).unwrap(), &pv + &qv);
        prop_assert_eq!((&p - &q).eval(&a).unwrap(), &pv - &qv);
        prop_assert_eq!((&p * &q).eval(&a).unwrap(), &pv * &qv);
    }

    #[test]
    fn evaluation_commutes_with_wedge_and_star(f in form(1), g in form(1), w in form(2), x in point()) {
        let a = at(&x);
        let both = wedge(&f, &g).unwrap().eval(&a).unwrap();
        let pointwise = wedge(&f.substitute(&a), &g.substitute(&a)).unwrap();
        prop_assert_eq!(both, pointwise.eval(&a).unwrap());
        prop_assert_eq!(
            hodge_star(&w).eval(&a).unwrap(),
            hodge_star(&w.substitute(&a)).eval(&a).unwrap()
        );
        // one-forms anticommute
        prop_assert!(wedge(&f, &g).unwrap().add(&wedge(&g, &f).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn star_is_an_involution(w in form(2)) {
        prop_assert_eq!(hodge_star(&hodge_star(&w)), w);
    }

    #[test]
    fn volume_matches_the_pfaffian(w in form(2)) {
        let c = |word: &str| w.coeff_of(word).unwrap();
        let pf = &(&(&c("tx") * &c("yz")) - &(&c("ty") * &c("xz"))) + &(&c("tz") * &c("xy"));
        prop_assert_eq!(volume_coefficient(&w).unwrap(), pf.scale(&rat(2, 1)));
        prop_assert_eq!(wedge(&w, &w).unwrap().coeff(0).clone(), volume_coefficient(&w).unwrap());
    }
}

fn s_params(s: &BigRational) -> Params {
    [(Var::S, s.clone())].into_iter().collect()
}

/// Model with `s` bound when it takes one.
fn model_at(id: ModelId, s: &BigRational) -> wrinkle_core::models::LocalModel {
    get_model(id, &s_params(s))
        .or_else(|_| get_model(id, &Params::new()))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn locus_samples_are_critical(n in 1i64..=12, d in 1i64..=6, seed in 0u64..1000) {
        let s = rat(n, d);
        for id in ModelId::ALL {
            let m = model_at(id, &s);
            let Some(set) = m.critical_set.clone() else { continue };
            let Some(pts) = exact_locus_samples(&set, 6, seed) else { continue };
            for p in pts {
                prop_assert!(m.jacobian_rank(&p).unwrap() < 2, "{} at {:?}", id, p);
            }
        }
    }

    #[test]
    fn forms_vanish_on_their_loci(n in 1i64..=8, d in 1i64..=8, e in 1i64..=6, seed in 0u64..1000) {
        let s = rat(n, d);
        let eps = rat(1, 6) / BigRational::from_integer(e.into());
        for (id, params) in [
            (FormId::Ls, vec![(Var::S, s.clone()), (Var::Eps, eps.clone())]),
            (FormId::Eq2Merging, vec![(Var::S, s.clone()), (Var::Eps, eps.clone())]),
        ] {
            let entry = get_form(id, &params.into_iter().collect()).unwrap();
            let m = entry.linked_model().unwrap();
            let Some(pts) = exact_locus_samples(m.critical_set.as_ref().unwrap(), 8, seed) else { continue };
            let f = entry.form();
            for p in pts {
                prop_assert!(f.eval(&at(&p)).unwrap().iter().all(Zero::is_zero), "{} at {:?}", id, p);
            }
        }
    }
}

#[test]
fn birth_correction_reproduces_ls() {
    let a = get_form(FormId::Eq1Birth, &Params::new()).unwrap();
    let b = get_form(FormId::Ls, &Params::new()).unwrap();
    assert!(a.symbolic.sub(&b.symbolic).unwrap().is_zero());
}
