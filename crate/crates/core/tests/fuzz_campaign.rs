use wigner_bounds::fuzz::{run_fuzz, TrialConfig};

#[test]
fn thousand_trials_without_violations() {
    let config = TrialConfig {
        seed: 2024,
        trials: 1000,
        n_max: 32,
        ..TrialConfig::default()
    };
    let report = run_fuzz(&config).unwrap();
    assert_eq!(report.trials_run, 1000);
    assert!(report.violations.is_empty(), "{:?}", &report.violations[..report.violations.len().min(5)]);
    for w in &report.worst_slacks {
        assert!(w.slack >= -1e-8, "{} {}", w.property, w.slack);
    }
    assert!(report.trials.iter().all(|t| t.mu > 0.0 && t.mu <= 1.0 + 1e-9));
}
