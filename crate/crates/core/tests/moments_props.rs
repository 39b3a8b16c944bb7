mod common;

use common::*;
use lpball::moments::{
    bound_comparator, bound_comparator_with, derivative_sign_series, f_endpoint, f_gamma_in_t, f_product_estimate,
    kuperberg_bound, ln_product_factor, MomentResult, Route, Sign,
};
use lpball::report::{scan, RowOptions};
use lpball::{conjugate, f_gamma, Execution, Exponent, TruncationPolicy};
use proptest::prelude::*;

fn fd_slope(n: u32, t: f64) -> f64 {
    let h = 1e-5;
    (f_gamma_in_t(dim(n), t + h).unwrap() - f_gamma_in_t(dim(n), t - h).unwrap()) / (2.0 * h)
}

#[test]
fn product_agrees_with_closed_form_example() {
    let policy = TruncationPolicy::default();
    let r = f_product_estimate(dim(5), ex(1.25), &policy, Execution::default());
    assert_eq!(r.route, Route::InfiniteProduct);
    let g = f_gamma(dim(5), ex(1.25)).value;
    assert!((r.value - g).abs() <= r.error_estimate + 1e-10 * r.value, "{} vs {g} ± {}", r.value, r.error_estimate);
    // the bound is informative, not vacuous
    assert!(r.error_estimate < 1e-4 * r.value);
}

#[test]
fn route_equivalence_sample() {
    let policy = TruncationPolicy::default();
    for n in [2u32, 3, 17, 50] {
        for p in [1.1, 1.5, 1.75] {
            let r = f_product_estimate(dim(n), ex(p), &policy, Execution::default());
            let g = f_gamma(dim(n), ex(p)).value;
            assert!((r.value - g).abs() <= r.error_estimate + 1e-10 * r.value, "n={n} p={p}");
            // truncation leaves out factors below one, so the partial product overshoots
            assert!(r.value >= g * (1.0 - 1e-13));
        }
    }
}

#[test]
fn three_routes_for_n3_p15() {
    let g = f_gamma(dim(3), ex(1.5)).value;
    let r = f_product_estimate(dim(3), ex(1.5), &TruncationPolicy::default(), Execution::default());
    assert!((r.value - g).abs() <= r.error_estimate + 1e-10 * g);
    let cfg = lpball::montecarlo::MCConfig::new(10_000_000, 11, 8).unwrap();
    let mc = lpball::montecarlo::estimate_f(dim(3), ex(1.5), &cfg);
    assert!(mc.within(g, 3.0), "{mc:?} vs {g}");
}

#[test]
fn self_dual_and_endpoint_values() {
    for n in 1..=100u32 {
        assert!(rel(f_gamma(dim(n), Exponent::TWO).value, kuperberg_bound(dim(n))) <= 1e-12);
        assert!(rel(f_gamma(dim(n), Exponent::ONE).value, f_endpoint(dim(n))) <= 1e-12);
        assert!(rel(f_gamma(dim(n), Exponent::INFINITY).value, f_endpoint(dim(n))) <= 1e-12);
        // the closed form approaches the endpoint value continuously
        assert!(rel(f_gamma(dim(n), ex(1.0 + 1e-6)).value, f_endpoint(dim(n))) <= 1e-4, "n={n}");
        assert!(rel(f_gamma(dim(n), ex(1e6)).value, f_endpoint(dim(n))) <= 1e-4, "n={n}");
    }
}

#[test]
fn product_factor_decays_like_inverse_square() {
    for n in [2.0, 5.0, 20.0, 50.0] {
        for t in [0.01, 0.1, 0.2, 0.25] {
            let dev = |k: u64| ln_product_factor(k, n, t).exp_m1().abs();
            let c = 1.1 * dev(1_000) * 1e6;
            assert!(dev(10_000) * 1e8 <= c, "n={n} t={t}: {} vs {c}", dev(10_000) * 1e8);
            // asymptotic coefficient 2(n − 1)(1 − 2t)
            let asym = 2.0 * (n - 1.0) * (1.0 - 2.0 * t);
            assert!(rel(dev(1_000_000) * 1e12, asym) < 1e-3, "n={n} t={t}");
        }
    }
}

#[test]
fn comparator_verdicts_survive_doubling() {
    let policy = TruncationPolicy::new(200_000, 1e-10, true).unwrap();
    for n in [2u32, 5, 20] {
        for (r, s) in [(1.05, 1.06), (1.3, 1.9), (2.5, 2.6), (3.0, f64::INFINITY)] {
            let a = bound_comparator(dim(n), ex(r), ex(s), &policy).unwrap();
            let b = bound_comparator_with(dim(n), ex(r), ex(s), &policy.doubled(), Execution::Sequential).unwrap();
            assert!(a.verdict && b.verdict, "n={n} r={r} s={s}");
        }
    }
}

#[test]
fn sign_series_matches_finite_difference() {
    let policy = TruncationPolicy::default();
    for n in [2u32, 3, 10, 20] {
        for t in [0.01, 0.05, 0.1, 0.2, 0.25] {
            let report = derivative_sign_series(dim(n), t, &policy).unwrap();
            let slope = fd_slope(n, t);
            assert_eq!(report.sign, if slope > 0.0 { Sign::Positive } else { Sign::Negative }, "n={n} t={t}");
        }
    }
}

#[test]
fn sign_series_value_is_log_derivative() {
    // the series stops once the sign is certain, so compare within its tail bound
    let policy = TruncationPolicy::default();
    for (n, t) in [(2u32, 0.1), (10, 0.25), (7, 0.03)] {
        let report = derivative_sign_series(dim(n), t, &policy).unwrap();
        let expected = fd_slope(n, t) / f_gamma_in_t(dim(n), t).unwrap();
        let gap = (report.series_value - expected).abs();
        assert!(gap <= report.tail_bound + 1e-6 * expected.abs(), "n={n} t={t}: {report:?} vs {expected}");
    }
}

#[test]
fn scan_rows_do_not_depend_on_backend() {
    let ns: Vec<_> = (2..=6).map(dim).collect();
    let ps: Vec<_> = [1.0, 1.2, 1.6, 2.0, 3.0, f64::INFINITY].into_iter().map(ex).collect();
    let mc = Some(lpball::montecarlo::MCConfig::new(4_000, 5, 4).unwrap());
    let policy = TruncationPolicy::new(50_000, 1e-10, true).unwrap();
    let seq = scan(&ns, &ps, &RowOptions { policy, mc, exec: Execution::Sequential }).unwrap();
    let def = scan(&ns, &ps, &RowOptions { policy, mc, exec: Execution::default() }).unwrap();
    assert_eq!(seq, def);
    assert!(seq.passes());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_symmetric_under_conjugation(n in 1u32..200, p in 1.0001f64..50.0) {
        let e = ex(p);
        let a = f_gamma(dim(n), e).value;
        prop_assert_eq!(a, f_gamma(dim(n), conjugate(e)).value);
        prop_assert!(rel(a, f_gamma(dim(n), ex(e.q())).value) <= 1e-12);
    }

    #[test]
    fn values_respect_bound_plus_error(n in 1u32..60, p in 1.0f64..30.0) {
        let policy = TruncationPolicy::new(20_000, 1e-10, true).unwrap();
        let e = ex(p);
        let bound = kuperberg_bound(dim(n));
        let results: [MomentResult; 2] = [f_gamma(dim(n), e), f_product_estimate(dim(n), e, &policy, Execution::Sequential)];
        for r in results {
            prop_assert!(r.value > 0.0);
            prop_assert!(r.value <= bound + r.error_estimate + 1e-15, "{:?}", r);
        }
    }

    #[test]
    fn closed_form_in_t_is_increasing(n in 2u32..40, t1 in 0.0f64..0.25, t2 in 0.0f64..0.25) {
        prop_assume!((t1 - t2).abs() > 1e-6);
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(f_gamma_in_t(dim(n), lo).unwrap() < f_gamma_in_t(dim(n), hi).unwrap());
    }
}
