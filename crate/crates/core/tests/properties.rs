use proptest::prelude::*;

use minimax_ci::minimax::{self, CandidateParams, CaseId};
use minimax_ci::report::fmt_real;
use minimax_ci::rules::{self, IntervalRule, LimitPoint, MixtureRule};
use minimax_ci::special::{noncentral_chisq_cdf, std_normal_cdf};

fn endpoint() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(0.0),
        8 => (0.05f64..8.0).prop_flat_map(|m| prop_oneof![Just(m), Just(-m)]),
    ]
}

fn rule() -> impl Strategy<Value = IntervalRule> {
    (endpoint(), endpoint())
        .prop_filter("distinct endpoints", |(a, b)| a != b)
        .prop_map(|(a, b)| IntervalRule::new(a.min(b), a.max(b)).unwrap())
}

fn mixture() -> impl Strategy<Value = MixtureRule> {
    prop::collection::vec((rule(), 0.05f64..1.0), 1..=3).prop_map(|comps| {
        let total: f64 = comps.iter().map(|c| c.1).sum();
        MixtureRule::new(comps.into_iter().map(|(r, w)| (r, w / total)).collect()).unwrap()
    })
}

proptest! {
    #[test]
    fn coverage_is_a_probability_and_even_in_lambda(r in rule(), lam in -100.0f64..100.0) {
        let a = rules::coverage(lam, &r).unwrap().get();
        let b = rules::coverage(-lam, &r).unwrap().get();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn equal_components_are_idempotent(r in rule(), lam in 0.0f64..20.0, w in 0.1f64..0.9) {
        let mix = MixtureRule::new(vec![(r, w), (r, 1.0 - w)]).unwrap();
        let m = rules::coverage_mixture(lam, &mix).unwrap().get();
        let s = rules::coverage(lam, &r).unwrap().get();
        prop_assert!((m - s).abs() < 1e-15);
    }

    #[test]
    fn coverage_nondecreasing_in_upper_endpoint(
        c1 in -8.0f64..-0.01, a in 1.0f64..10.0, step in 0.0f64..5.0, lam in 0.01f64..20.0,
    ) {
        let lo = rules::coverage(lam, &IntervalRule::new(c1, a).unwrap()).unwrap().get();
        let hi = rules::coverage(lam, &IntervalRule::new(c1, a + step).unwrap()).unwrap().get();
        prop_assert!(hi >= lo - 1e-15);
    }

    #[test]
    fn derivative_matches_finite_difference(mix in mixture(), lam in 0.05f64..20.0) {
        let h = 1e-5;
        let fd = (rules::coverage_mixture(lam + h, &mix).unwrap().get()
            - rules::coverage_mixture(lam - h, &mix).unwrap().get()) / (2.0 * h);
        prop_assert!((fd - rules::coverage_dlambda(lam, &mix).unwrap()).abs() <= 1e-6);
    }

    #[test]
    fn min_coverage_is_a_lower_bound(mix in mixture(), lams in prop::collection::vec(1e-6f64..200.0, 20)) {
        let m = rules::min_coverage(&mix, 1e-8).unwrap().min_coverage.get();
        for lam in lams {
            prop_assert!(m <= rules::coverage_mixture(lam, &mix).unwrap().get() + 1e-9);
        }
    }

    #[test]
    fn length_closure_holds_for_feasible_params(
        case in prop_oneof![Just(CaseId::Case1), Just(CaseId::Case2), Just(CaseId::Case3), Just(CaseId::Case7)],
        c1 in -6.0f64..-1e-3, a1 in -6.0f64..-1e-3, p in 0.0f64..0.999, h in 1.01f64..8.0,
    ) {
        let params = CandidateParams::new(c1, a1, p);
        if let Ok(c2) = minimax::close_length(case, params, h) {
            if minimax::feasible(case, params, c2) {
                let mix = minimax::build_mixture(case, params, h).unwrap();
                prop_assert!((rules::expected_length(&mix) - h).abs() <= 1e-9);
                prop_assert!(mix.components().len() <= 2);
            } else {
                prop_assert!(minimax::build_mixture(case, params, h).is_err());
            }
        }
    }

    #[test]
    fn noncentral_cdf_monotone_in_x(x in 0.0f64..50.0, dx in 0.0f64..10.0, dof in 1u32..12, nc in 0.0f64..30.0) {
        let a = noncentral_chisq_cdf(x, dof as f64, nc).unwrap().get();
        let b = noncentral_chisq_cdf(x + dx, dof as f64, nc).unwrap().get();
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn normal_cdf_symmetric(x in -30.0f64..30.0) {
        let s = std_normal_cdf(x).unwrap().get() + std_normal_cdf(-x).unwrap().get();
        prop_assert!((s - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn real_formatting_keeps_ten_digits(x in prop::num::f64::NORMAL) {
        let y: f64 = fmt_real(x).parse().unwrap();
        prop_assert!(((x - y) / x).abs() <= 5.000001e-10);
    }
}

/// Dense-grid oracle for the infimum over lambda, limits included.
fn dense_min(mix: &MixtureRule) -> f64 {
    let mut m = rules::coverage_limit(mix, LimitPoint::ZeroPlus)
        .get()
        .min(rules::coverage_limit(mix, LimitPoint::Infinity).get());
    let mut lam = 1e-3;
    while lam <= 50.0 {
        m = m.min(rules::coverage_mixture(lam, mix).unwrap().get());
        lam += 1e-3;
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn min_coverage_matches_dense_scan(mix in mixture()) {
        let m = rules::min_coverage(&mix, 1e-8).unwrap().min_coverage.get();
        prop_assert!((m - dense_min(&mix)).abs() <= 1e-6, "{} vs {}", m, dense_min(&mix));
    }
}
