use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use equisum::constructions::{construct, ConstructionError};
use equisum::feasibility::{
    classify, derive_parameters, f_enclosure, f_value, g_enclosure, g_value, Precision, VerdictKind,
};
use equisum::geometry::Vector;
use equisum::mixednorm::{mixed_distance, verify_equilateral, MixedPoint, DEFAULT_REL_TOL};
use equisum::realnum::{certified_sign, enclose_sqrt, int, pow2_inv, Enclosure, Rational, Sign};

fn rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..1_000)
        .prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn nonneg_rational() -> impl Strategy<Value = Rational> {
    (0i64..1_000_000_000, 1i64..1_000_000)
        .prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn enclosure() -> impl Strategy<Value = Enclosure> {
    (rational(), rational()).prop_map(|(x, y)| {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        Enclosure::new(lo, hi).unwrap()
    })
}

/// Endpoints and midpoint: enough to catch a wrong endpoint formula.
fn samples(e: &Enclosure) -> Vec<Rational> {
    vec![e.lo().clone(), e.midpoint(), e.hi().clone()]
}

fn point(x: &[f64], y: &[f64]) -> MixedPoint {
    MixedPoint::new(
        Vector::new(x.to_vec()).unwrap(),
        Vector::new(y.to_vec()).unwrap(),
    )
}

fn mixed_point(a: usize, b: usize) -> impl Strategy<Value = MixedPoint> {
    (
        prop::collection::vec(-10.0f64..10.0, a),
        prop::collection::vec(-10.0f64..10.0, b),
    )
        .prop_map(|(x, y)| point(&x, &y))
}

proptest! {
    #[test]
    fn sqrt_enclosure_is_sound(q in nonneg_rational(), k in 1u32..120) {
        let eps = pow2_inv(k);
        let e = enclose_sqrt(&q, &eps).unwrap();
        prop_assert!(!e.lo().is_negative());
        prop_assert!(e.lo() * e.lo() <= q);
        prop_assert!(q <= e.hi() * e.hi());
        prop_assert!(e.width() <= eps);
    }

    #[test]
    fn interval_ops_enclose_pointwise_results(x in enclosure(), y in enclosure(), k in rational()) {
        let sum = &x + &y;
        let diff = &x - &y;
        let prod = &x * &y;
        let sq = x.square();
        let scaled = x.scale(&k);
        let rsub = x.rsub(&k);
        for p in samples(&x) {
            prop_assert!(sq.contains(&(&p * &p)));
            prop_assert!(scaled.contains(&(&p * &k)));
            prop_assert!(rsub.contains(&(&k - &p)));
            for q in samples(&y) {
                prop_assert!(sum.contains(&(&p + &q)));
                prop_assert!(diff.contains(&(&p - &q)));
                prop_assert!(prod.contains(&(&p * &q)));
            }
        }
        prop_assert!(!sq.lo().is_negative());
    }

    #[test]
    fn certified_sign_matches_exact_oracle(q in nonneg_rational(), r in nonneg_rational()) {
        // sign(√q − r) = sign(q − r²) for r ≥ 0
        let oracle = &q - &r * &r;
        let cert = certified_sign(
            |eps| &enclose_sqrt(&q, eps).unwrap() - &Enclosure::point(r.clone()),
            &pow2_inv(200),
        );
        let expected = if oracle.is_positive() {
            Sign::Positive
        } else if oracle.is_negative() {
            Sign::Negative
        } else {
            Sign::Indeterminate
        };
        prop_assert_eq!(cert.sign, expected);
        if oracle.is_zero() {
            prop_assert!(cert.enclosure.contains(&int(0)));
        }
    }

    #[test]
    fn mixed_distance_is_symmetric(
        (p, q) in (1usize..6, 1usize..6).prop_flat_map(|(a, b)| (mixed_point(a, b), mixed_point(a, b)))
    ) {
        prop_assert_eq!(mixed_distance(&p, &q).unwrap(), mixed_distance(&q, &p).unwrap());
    }

    #[test]
    fn mixed_distance_triangle_inequality(
        (p, q, r) in (1usize..6, 1usize..6).prop_flat_map(|(a, b)| (mixed_point(a, b), mixed_point(a, b), mixed_point(a, b)))
    ) {
        let d = |u: &MixedPoint, v: &MixedPoint| mixed_distance(u, v).unwrap();
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r) + 1e-12);
    }

    #[test]
    fn mixed_distance_is_homogeneous(
        (p, q) in (1usize..6, 1usize..6).prop_flat_map(|(a, b)| (mixed_point(a, b), mixed_point(a, b))),
        t in 1e-3f64..1e3,
    ) {
        let d = mixed_distance(&p, &q).unwrap();
        let dt = mixed_distance(&p.scaled(t), &q.scaled(t)).unwrap();
        prop_assert!((dt - t * d).abs() <= 1e-12 * (t * d).max(f64::MIN_POSITIVE));
    }

    #[test]
    fn parameter_identities(a in 1u64..10_000, b in 1u64..10_000_000) {
        let p = derive_parameters(a, b).unwrap();
        prop_assert_eq!(p.alpha + p.beta, a + 1);
        prop_assert!(p.beta <= a);
        prop_assert!(p.alpha >= 1);
        prop_assert_eq!(p.alpha * (p.c - 1) + p.beta * p.c, b);
        prop_assert_eq!((p.c - 1) * (a + 1) + p.beta, b);
    }

    #[test]
    fn f_and_g_doubles_lie_in_enclosures(n in 1u64..1_000_000) {
        let eps = pow2_inv(60);
        let tol = 1e-15;
        let f = f_enclosure(n, &eps).unwrap();
        let g = g_enclosure(n + 1, &eps).unwrap();
        let fv = f_value(n);
        let gv = g_value(n + 1);
        let to_f64 = |q: &Rational| num_traits::ToPrimitive::to_f64(q).unwrap();
        prop_assert!(to_f64(f.lo()) * (1.0 - tol) <= fv && fv <= to_f64(f.hi()) * (1.0 + tol));
        prop_assert!(to_f64(g.lo()) * (1.0 - tol) <= gv && gv <= to_f64(g.hi()) * (1.0 + tol));
    }

    #[test]
    fn classification_is_symmetric(a in 1u64..40, b in 1u64..200) {
        let fwd = classify(a, b, Precision::default()).unwrap();
        let rev = classify(b, a, Precision::default()).unwrap();
        prop_assert_eq!(fwd.kind, rev.kind);
        prop_assert_eq!(fwd.params, rev.params);
        if a != b {
            prop_assert_ne!(fwd.swapped, rev.swapped);
        }
    }
}

#[test]
fn construct_verify_round_trip_up_to_60() {
    let mut built = 0;
    for a in 1..60u64 {
        for b in 1..=60 - a {
            match construct(a, b) {
                Ok(r) => {
                    assert_eq!(r.len() as u64, a + b + 1, "({a}, {b})");
                    let report = verify_equilateral(&r.point_set, DEFAULT_REL_TOL).unwrap();
                    assert!(report.pass, "({a}, {b}): {report:?}");
                    built += 1;
                }
                Err(ConstructionError::Infeasible { verdict, .. }) => {
                    panic!("({a}, {b}) unexpectedly infeasible: {:?}", verdict.kind)
                }
                Err(e) => panic!("({a}, {b}): {e}"),
            }
        }
    }
    assert_eq!(built, 59 * 60 / 2);
}

#[test]
fn swapped_construction_mirrors_factors() {
    for (a, b) in [(8u64, 3u64), (12, 5), (40, 2)] {
        let r = construct(a, b).unwrap();
        assert_eq!((r.point_set.a as u64, r.point_set.b as u64), (a, b));
        assert!(r.point_set.swapped);
        assert!(r
            .point_set
            .points
            .iter()
            .all(|p| p.x.dim() as u64 == a && p.y.dim() as u64 == b));
        assert!(
            verify_equilateral(&r.point_set, DEFAULT_REL_TOL)
                .unwrap()
                .pass
        );
    }
    assert_ne!(
        classify(3, 8, Precision::default()).unwrap().kind,
        VerdictKind::Indeterminate
    );
}
