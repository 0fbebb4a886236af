mod common;

use common::{box_theta, check_theta_symmetries, euler_squared, instance, q};
use hecke_norm::error::Error;
use hecke_norm::quadfield::{FieldContext, QuadLattice, QuadNum};
use hecke_norm::theta::{eta_squared_coeffs, HeckeLattice, ThetaSeries};
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn lattice(d: i64, ideal: &str, kappa: u64) -> HeckeLattice {
    let ctx = FieldContext::new(d).unwrap();
    let a = match ideal {
        "ring" => ctx.ring().clone(),
        "different" => ctx.different(),
        _ => unreachable!(),
    };
    HeckeLattice::new(&ctx, &a, kappa).unwrap()
}

fn as_maps(series: &ThetaSeries) -> Vec<BTreeMap<BigRational, i64>> {
    series
        .cosets
        .iter()
        .map(|c| c.terms.iter().cloned().collect())
        .collect()
}

#[test]
fn lattice_examples() {
    let hl = lattice(12, "different", 1);
    assert_eq!(hl.n, q(12, 1));
    assert_eq!(&hl.dual, hl.ctx.ring());

    let hl = lattice(12, "ring", 1);
    assert_eq!(hl.n, q(1, 1));
    assert_eq!(hl.dual, hl.ctx.different().inverse_ideal(&hl.ctx).unwrap());

    let hl = lattice(5, "ring", 2);
    assert_eq!(hl.n, q(1, 2));
    let two_d = hl.ctx.different().scale_rational(&q(2, 1)).unwrap();
    assert_eq!(hl.dual, two_d.inverse_ideal(&hl.ctx).unwrap());

    let ctx = FieldContext::new(5).unwrap();
    let half = ctx.ring().scale_rational(&q(1, 2)).unwrap();
    assert!(matches!(
        HeckeLattice::new(&ctx, &half, 1),
        Err(Error::NotIntegralIdeal(_))
    ));
    let not_ideal = QuadLattice::new(q(1, 2), q(1, 2), q(2, 1)).unwrap();
    assert!(matches!(
        HeckeLattice::new(&ctx, &not_ideal, 1),
        Err(Error::NotAnIdeal(_))
    ));
}

#[test]
fn quadratic_form_is_even_integral() {
    for (d, ideal, kappa) in [
        (12, "different", 1),
        (5, "ring", 2),
        (13, "ring", 3),
        (8, "different", 2),
    ] {
        let hl = lattice(d, ideal, kappa);
        let [a1, a2] = hl.ideal.basis();
        let [d1, d2] = hl.dual.basis();
        for v in [&a1, &a2, &(&a1 + &a2)] {
            assert!(hl.q(v).is_integer());
            for w in [&d1, &d2] {
                assert!(hl.pairing(v, w).is_integer());
            }
        }
    }
}

#[test]
fn discriminant_group_size_and_pairing() {
    for (d, ideal, kappa) in [
        (12, "different", 1),
        (5, "ring", 1),
        (12, "ring", 2),
        (5, "ring", 3),
        (8, "ring", 3),
    ] {
        let hl = lattice(d, ideal, kappa);
        let group = hl.discriminant_group();
        // index of the ideal in its dual, from norms alone
        let index = hl.ideal.ideal_norm() / hl.dual.ideal_norm();
        assert_eq!(q(group.reps.len() as i64, 1), index);
        assert_eq!(group.reps.len() as i64, d * (kappa * kappa) as i64);
        for (i, r) in group.reps.iter().enumerate() {
            for s in &group.reps[..i] {
                assert!(!hl.ideal.contains(&(r - s)));
            }
            assert!(hl.ideal.contains(&(r + &group.reps[group.neg[i]])));
        }
    }
}

#[test]
fn orbit_counts_match_box_scan() {
    for (d, ideal, kappa, x) in [
        (12, "different", 1, q(1, 12)),
        (5, "ring", 1, q(1, 1)),
        (8, "ring", 1, q(3, 1)),
    ] {
        let hl = lattice(d, ideal, kappa);
        let reps = hl.discriminant_group().reps;
        let (_, count) = box_theta(
            &hl.ctx,
            &hl.ideal,
            &hl.dual,
            &hl.n,
            &hl.epsilon.value,
            &reps,
            &x,
        );
        assert_eq!(
            hl.orbit_representatives(&x).unwrap().len(),
            count,
            "{d} {ideal} {kappa}"
        );
    }
    // Nm = 1 splits into the orbits of 1 and 2 + sqrt 3 because eps = (2 + sqrt 3)^2
    let hl = lattice(12, "different", 1);
    let orbits = hl.orbit_representatives(&q(1, 12)).unwrap();
    assert_eq!(orbits, vec![QuadNum::one(), QuadNum::new(q(2, 1), q(1, 2))]);
    assert!(hl.orbit_representatives(&q(1, 13)).unwrap().is_empty());
}

#[test]
fn theta_matches_box_scan() {
    let cases = [
        (12, "different", 1, q(5, 1)),
        (12, "ring", 1, q(6, 1)),
        (12, "ring", 2, q(3, 1)),
        (5, "ring", 1, q(8, 1)),
        (5, "ring", 2, q(3, 1)),
        (8, "ring", 1, q(6, 1)),
        (8, "different", 2, q(2, 1)),
        (13, "ring", 1, q(4, 1)),
        (21, "different", 1, q(3, 1)),
        (40, "ring", 3, q(2, 1)),
    ];
    for (d, ideal, kappa, x) in cases {
        let hl = lattice(d, ideal, kappa);
        let series = hl.theta_expansion(&x).unwrap();
        let reps: Vec<QuadNum> = series.cosets.iter().map(|c| c.rep.clone()).collect();
        let (expected, _) = box_theta(
            &hl.ctx,
            &hl.ideal,
            &hl.dual,
            &hl.n,
            &hl.epsilon.value,
            &reps,
            &x,
        );
        assert_eq!(as_maps(&series), expected, "{d} {ideal} {kappa}");
        assert!(series
            .cosets
            .iter()
            .flat_map(|c| &c.terms)
            .all(|(e, _)| e.is_positive()));
    }
}

#[test]
fn vanishing_and_four_components() {
    assert_eq!(
        lattice(12, "different", 1)
            .theta_expansion(&q(5, 1))
            .unwrap()
            .nonzero_components()
            .count(),
        4
    );
    assert!(lattice(12, "ring", 1)
        .theta_expansion(&q(20, 1))
        .unwrap()
        .is_zero());
    assert!(lattice(5, "ring", 1)
        .theta_expansion(&q(20, 1))
        .unwrap()
        .is_zero());
}

#[test]
fn eta_squared_matches_pentagonal_product() {
    let coeffs = eta_squared_coeffs(&(q(1, 12) + q(50, 1)));
    assert_eq!(coeffs[0], (q(1, 12), 1));
    assert_eq!(coeffs[1], (q(13, 12), -2));
    let expected: Vec<(BigRational, i64)> = euler_squared(50)
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0)
        .map(|(i, c)| (q(1, 12) + q(i as i64, 1), c))
        .collect();
    assert_eq!(coeffs, expected);
    assert!(eta_squared_coeffs(&q(1, 13)).is_empty());
}

#[test]
fn components_are_eta_squared_up_to_sign() {
    let x = q(10, 1);
    let eta = eta_squared_coeffs(&x);
    let series = lattice(12, "different", 1).theta_expansion(&x).unwrap();
    for c in series.nonzero_components() {
        let sign = c.terms[0].1;
        assert!(sign == 1 || sign == -1);
        let scaled: Vec<_> = eta.iter().map(|(e, k)| (e.clone(), sign * k)).collect();
        assert_eq!(c.terms, scaled);
    }
}

#[test]
fn raising_precision_only_appends() {
    for (d, ideal, kappa) in [(12, "different", 1), (13, "ring", 2), (8, "ring", 1)] {
        let hl = lattice(d, ideal, kappa);
        let x = q(3, 1);
        let small = hl.theta_expansion(&x).unwrap();
        let big = hl.theta_expansion(&(&x * q(2, 1))).unwrap();
        for (s, b) in small.cosets.iter().zip(&big.cosets) {
            let cut: Vec<_> = b.terms.iter().filter(|(e, _)| *e <= x).cloned().collect();
            assert_eq!(s.terms, cut);
        }
    }
}

#[test]
fn json_round_trip() {
    let series = lattice(12, "different", 1)
        .theta_expansion(&q(3, 1))
        .unwrap();
    let text = series.to_json();
    let back = ThetaSeries::from_json(&text).unwrap();
    assert_eq!(back, series);
    assert_eq!(back.to_json(), text);
    assert!(matches!(
        ThetaSeries::from_json("{\"cosets\":"),
        Err(Error::Parse { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn antisymmetry_and_narrow_class_invariance((ctx, ideal, kappa, mu) in instance()) {
        let r = check_theta_symmetries(&ctx, &ideal, kappa, &mu, &q(2, 1));
        prop_assert!(r.is_ok(), "{:?}", r);
    }
}
