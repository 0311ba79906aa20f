//! Seeded property checks on random coherent-state mixtures.

use wigner_bounds::fuzz::{run_fuzz, TrialConfig};

fn main() -> wigner_bounds::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let config = TrialConfig {
        seed,
        trials: 50,
        n_max: 24,
        ..TrialConfig::default()
    };
    let report = run_fuzz(&config)?;
    println!("seed {seed}: {} trials in {:.2?}", report.trials_run, report.elapsed);
    for w in &report.worst_slacks {
        println!("  {:<28} worst slack {:+.3e} (floor {:e})", w.property, w.slack, w.floor);
    }
    println!("violations: {}", report.violations.len());
    let closest = report
        .trials
        .iter()
        .min_by(|a, b| a.entropy_minus_target.total_cmp(&b.entropy_minus_target))
        .expect("at least one trial");
    println!(
        "closest to the vacuum value: trial {} with {} components, S - target = {:.3e}",
        closest.index, closest.components, closest.entropy_minus_target
    );
    Ok(())
}
