use proptest::prelude::*;

use rug::ops::Pow;
use qpi_core::catalog::{ParamPoint, Registry, Side};
use qpi_core::limits::{sine_product_series, SineVariant};
use qpi_core::precision::{parse_rational, ten_pow_neg, to_bigreal};
use qpi_core::qcore::{qpoch, qpoch_finite, qpoch_infinite, SumOptions};
use qpi_core::report::rational_string;
use qpi_core::telescoping::{finite_sum_identity, nabla_check, tau, theorem_lhs, theorem_rhs, CoefficientVector, TelescopeSpec};
use qpi_core::{BigReal, Rational};

fn unit() -> impl Strategy<Value = Rational> {
    (2i64..40).prop_flat_map(|d| (1..d).prop_map(move |n| Rational::from((n, d))))
}

fn any_rational() -> impl Strategy<Value = Rational> {
    (-60i64..60, 1i64..30).prop_map(|(n, d)| Rational::from((n, d)))
}

fn spec(max_s: usize) -> impl Strategy<Value = TelescopeSpec> {
    (1..=max_s).prop_flat_map(|s| {
        (prop::collection::vec(unit(), s), prop::collection::vec(unit(), s), unit())
            .prop_map(|(xs, ys, q)| TelescopeSpec::new(xs, ys, q).expect("y in (0,1) is never a pole"))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn splitting_law(x in any_rational(), q in unit(), m in 0usize..25, n in 0usize..25) {
        let xm = Rational::from(&x * &q.clone().pow(m as u32));
        let whole = qpoch_finite(&x, &q, m + n);
        let parts = qpoch_finite(&x, &q, m) * qpoch_finite(&xm, &q, n);
        prop_assert_eq!(whole, parts);
    }
}


proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_identity_is_exact(s in spec(4), n in 0usize..40) {
        let (l, r, res) = finite_sum_identity(&s, n).unwrap();
        prop_assert_eq!(res, 0);
        prop_assert_eq!(l, r);
    }

    #[test]
    fn nabla_matches_closed_form(s in spec(3), k in 0usize..20) {
        prop_assert_eq!(nabla_check(&s, k).unwrap(), 0);
    }

    #[test]
    fn tau_at_zero_is_one(s in spec(4)) {
        prop_assert_eq!(tau(&s, 0).unwrap(), 1);
    }

    #[test]
    fn coefficient_vector_reproduces_brackets(s in spec(4)) {
        prop_assert!(CoefficientVector::of(&s).check(&s));
    }

    #[test]
    fn rational_strings_round_trip(r in any_rational()) {
        prop_assert_eq!(parse_rational(&rational_string(&r)).unwrap(), r);
    }

    #[test]
    fn exact_and_real_pochhammer_agree(x in unit(), q in unit(), n in 0usize..30) {
        let exact = qpoch_finite(&x, &q, n);
        let real = qpoch_finite(&to_bigreal(&x, 50), &to_bigreal(&q, 50), n);
        prop_assert!((&real - &to_bigreal(&exact, 50)).abs() < BigReal::from_f64(1e-45, 50));
        prop_assert_eq!(qpoch(&x, &q, n as i64).unwrap(), exact);
    }

    #[test]
    fn infinite_pochhammer_bound_holds(x in unit(), q in unit()) {
        let a = qpoch_infinite(&to_bigreal(&x, 40), &to_bigreal(&q, 40), 40).unwrap();
        let b = qpoch_infinite(&to_bigreal(&x, 90), &to_bigreal(&q, 90), 80).unwrap();
        let slack = a.bound.magnitude() + &BigReal::from_f64(1e-41, 40);
        prop_assert!((&a.value - &b.value).abs() <= slack);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn theorem_sides_are_symmetric(s in spec(4), shift in 0usize..4) {
        let mut xs = s.xs().to_vec();
        let mut ys = s.ys().to_vec();
        let r = shift % xs.len();
        xs.rotate_left(r);
        ys.reverse();
        let t = TelescopeSpec::new(xs, ys, s.q().clone()).unwrap();
        let tol = BigReal::from_f64(1e-50, 60);
        prop_assert!((&theorem_lhs(&s, 60).unwrap().value - &theorem_lhs(&t, 60).unwrap().value).abs() <= tol);
        prop_assert!((&theorem_rhs(&s, 60).unwrap().value - &theorem_rhs(&t, 60).unwrap().value).abs() <= tol);
    }

    #[test]
    fn theorem_residual_within_bounds(s in spec(3)) {
        let l = theorem_lhs(&s, 50).unwrap();
        let r = theorem_rhs(&s, 50).unwrap();
        let allowed = &(l.bound.magnitude() + r.bound.magnitude()) + &BigReal::from_f64(1e-45, 50);
        prop_assert!((&l.value - &r.value).abs() <= allowed);
    }

    #[test]
    fn sine_product_partial_sums_within_bound(x in unit(), y in unit(), n in 50usize..400) {
        for variant in [SineVariant::Product, SineVariant::Reciprocal] {
            let series = sine_product_series(&[x.clone(), y.clone()], variant).unwrap();
            let s = qpi_core::limits::classical_sum(&series, n, 30).unwrap();
            let t = qpi_core::limits::sine_product_target(&[x.clone(), y.clone()], variant, 30);
            prop_assert!((&s.value - &t).abs() <= *s.bound.magnitude());
        }
    }

    #[test]
    fn doubled_cap_moves_q_series_less_than_bound(q in unit(), pick in 0usize..7) {
        let ids = ["q-ramanujan-a", "q-ramanujan-b", "sun", "thm-b", "thm-c", "thm-d", "thm-e"];
        prop_assume!(q <= Rational::from((9, 10)));
        let series = qpi_core::catalog::qmain_series(ids[pick], &q).unwrap().to_real(100);
        let a = series.sum(40, &SumOptions::default()).unwrap();
        let b = series.sum(40, &SumOptions { fixed_terms: Some(2 * a.terms_used), ..SumOptions::default() }).unwrap();
        prop_assert!((&a.value - &b.value).abs() <= *a.bound.magnitude());
    }
}

/// Every classical partial sum on a grid of N lies within its bound of the
/// closed form.
#[test]
fn classical_sums_within_bounds_on_grid() {
    let points = [ParamPoint::new(), ParamPoint::from_fractions(&[("x", 2, 7), ("y", 3, 5)])];
    for spec in qpi_core::limits::classical_specs() {
        let p = if spec.params.is_empty() { &points[0] } else { &points[1] };
        let target = spec.target(p, 40).unwrap();
        for n in [1usize, 2, 5, 17, 64, 300] {
            match spec.sum(p, n, 40) {
                Ok(s) => assert!((&s.value - &target).abs() <= *s.bound.magnitude(), "{} N={n}", spec.id),
                // small N may sit before the certificate holds; that must be reported, never silently wrong
                Err(e) => assert!(matches!(e, qpi_core::Error::TailNotCertified(_)), "{} N={n}: {e}", spec.id),
            }
        }
        // the default term count is always certified
        assert!(spec.sum(p, spec.default_terms.min(2000), 40).is_ok(), "{}", spec.id);
    }
}

/// A right side scaled by 1 + 1e-10 must be rejected everywhere on the grid.
#[test]
fn corrupted_fixture_fails() {
    let reg = Registry::standard();
    for id in ["sun", "thm-e", "q-ramanujan-b"] {
        for q in qpi_core::catalog::default_q_grid() {
            let p = ParamPoint::new().with("q", q);
            let l = reg.eval_side(id, Side::Lhs, &p, 60).unwrap();
            let r = reg.eval_side(id, Side::Rhs, &p, 60).unwrap();
            let bad = &r.value * &to_bigreal(&(Rational::from(1) + ten_pow_neg(10)), 60);
            let residual = (&l.value - &bad).abs();
            assert!(residual > to_bigreal(&ten_pow_neg(50), 30));
        }
    }
}
