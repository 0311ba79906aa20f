use proptest::prelude::*;

use wigner_bounds::bounds::{bound_b1, purity_only_bound};
use wigner_bounds::fuzz::{draw_mixture, run_property_suite, trial_rng};
use wigner_bounds::threshold::{limiting_threshold, partial_log_sum, solve_t_n, DEFAULT_TOL};
use wigner_bounds::{assess, entropy_target, variance_threshold, QuadratureConfig};

proptest! {
    #[test]
    fn thresholds_increase_towards_limit(n in 2usize..150) {
        let a = solve_t_n(n, DEFAULT_TOL).unwrap();
        let b = solve_t_n(n + 1, DEFAULT_TOL).unwrap();
        prop_assert!(b.mu_n >= a.mu_n);
        prop_assert!(b.mu_gap < a.mu_gap);
        prop_assert!(a.mu_n <= limiting_threshold());
        prop_assert!(a.mu_gap > 0.0);
        prop_assert!(a.residual <= 1e-13);
    }

    #[test]
    fn variance_threshold_is_monotone(v in 0.0f64..1.0, dv in 0.0f64..0.5) {
        let hi = (v + dv).min(1.0);
        prop_assert!(variance_threshold(hi).unwrap() >= variance_threshold(v).unwrap());
    }

    #[test]
    fn log_series_grows_in_t_and_order(t in 0.0f64..1.0, dt in 0.0f64..0.2, n in 1usize..60) {
        let t2 = (t + dt).min(1.0);
        prop_assert!(partial_log_sum(t2, n).unwrap() >= partial_log_sum(t, n).unwrap());
        prop_assert!(partial_log_sum(t, n + 1).unwrap() >= partial_log_sum(t, n).unwrap());
    }

    #[test]
    fn purity_only_bound_is_ordered(mu in 0.01f64..2.0, n in 2usize..40) {
        let b1 = bound_b1(mu).unwrap();
        let bn = purity_only_bound(mu, n).unwrap();
        let bn1 = purity_only_bound(mu, n + 1).unwrap();
        prop_assert!(bn >= b1 - 1e-15);
        prop_assert!(bn1 >= bn);
    }

    #[test]
    fn purity_below_threshold_guarantees_target(n in 2usize..30, frac in 0.0f64..1.0) {
        let e = solve_t_n(n, DEFAULT_TOL).unwrap();
        let mu = e.mu_n * frac.max(1e-3);
        prop_assert!(purity_only_bound(mu, n).unwrap() >= entropy_target() - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_mixtures_satisfy_every_property(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let d = draw_mixture(&mut rng, 4, 3.0).build().unwrap();
        let suite = run_property_suite(&d, 16, &QuadratureConfig::default()).unwrap();
        for s in &suite.slacks {
            prop_assert!(!s.violated(), "{} slack {}", s.property, s.slack);
        }
        let r = assess(&d, 16, &QuadratureConfig::default()).unwrap();
        for k in 1..16 {
            prop_assert!(r.descent.get(k + 1) <= r.descent.get(k) + 1e-12);
            prop_assert!(r.b(k + 1) >= r.b(k) - 1e-12);
        }
        let t = r.t;
        for k in 1..=16 {
            // Jensen: E[(1-X)^k] ≥ (1-E[X])^k
            prop_assert!(r.descent.get(k) >= t.powi(k as i32) - 1e-9);
        }
    }
}
