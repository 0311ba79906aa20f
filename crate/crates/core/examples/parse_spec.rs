//! State records in JSON, validated and analyzed.

use wigner_bounds::report::{analyze_spec, validate_record};
use wigner_bounds::{QuadratureConfig, StateSpec};

fn main() -> wigner_bounds::Result<()> {
    let records = [
        r#"{"type": "vacuum"}"#,
        r#"{"type": "thermal", "nbar": 0.5}"#,
        r#"{"type": "squeezed_vacuum", "r": 0.8}"#,
        r#"{"type": "mixture", "weights": [0.6, 0.4], "centers": [[0, 0], [2, 1]]}"#,
        r#"{"type": "fock01", "p1": 0.7}"#,
        r#"{"type": "flat_top", "mu": 3.0}"#,
        r#"{"type": "thermal", "nbar": 1, "extra": true}"#,
    ];
    let cfg = QuadratureConfig::default();
    for text in records {
        match StateSpec::parse(text).and_then(|spec| analyze_spec(&spec, 8, &cfg)) {
            Ok(a) => match a.report {
                Some(r) => println!(
                    "{text}\n  mu = {:.6}, S = {:.6}, B_8 = {:.6}, verdict: {}",
                    r.mu.value,
                    r.entropy.value,
                    r.b(8),
                    r.verdicts.overall.as_str()
                ),
                None => println!("{text}\n  constraints fail, min W = {:.4}", a.constraints.min_value_found),
            },
            Err(e) => println!("{text}\n  rejected: {e}"),
        }
    }
    let doc: serde_json::Value = serde_json::from_str(&wigner_bounds::report::cmd_thresholds(4, wigner_bounds::report::Format::Json)?)
        .expect("valid json");
    println!("threshold record valid: {}", validate_record(&doc).is_ok());
    Ok(())
}
