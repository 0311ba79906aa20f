//! Command implementations behind the CLI, their JSON/CSV output, and exit codes.
//!
//! JSON output is an [`OutputRecord`]:
//!
//! ```text
//! { "schema_version": "1.0.0", "command": "...", "inputs": {...},
//!   "results": {...}, "tool_version": "..." }
//! ```
//!
//! CSV output carries a fixed header per command. Floats in CSV are written
//! with 17 significant digits.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{assess, entropy_target, BoundReport};
use crate::error::{Error, Result};
use crate::functionals::{check_constraints, ConstraintReport};
use crate::fuzz::{run_fuzz, sharpness_demo, FuzzReport, SharpnessRow, TrialConfig};
use crate::quadrature::QuadratureConfig;
use crate::states::StateSpec;
use crate::threshold::{limiting_t, limiting_threshold, table_to_csv, threshold_table, DEFAULT_TOL};

pub const SCHEMA_VERSION: &str = "1.0.0";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Domain(format!("unknown format '{other}', expected csv or json"))),
        }
    }
}

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Internal = 1,
    Usage = 2,
    Parse = 3,
    ConstraintFailure = 4,
    NonConvergence = 5,
    ViolationsFound = 6,
    Io = 7,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn for_error(e: &Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Validation(_) => ExitStatus::Parse,
            Error::Domain(_) => ExitStatus::Usage,
            Error::InvalidInput(_) => ExitStatus::ConstraintFailure,
            Error::NonConvergence { .. } | Error::ConstraintEstimate { .. } => ExitStatus::NonConvergence,
            Error::MissingMetadata(_) => ExitStatus::Internal,
            Error::Io(_) => ExitStatus::Io,
        }
    }
}

/// Envelope of every JSON document the tool writes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub tool_version: String,
}

impl OutputRecord {
    pub fn new(command: &str, inputs: Value, results: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            inputs,
            results,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records serialize");
        s.push('\n');
        s
    }
}

/// Rendered command output together with the status the process should exit with.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub text: String,
    pub status: ExitStatus,
}

fn require_keys(obj: &Value, keys: &[&str], ctx: &str) -> std::result::Result<(), String> {
    let map = obj.as_object().ok_or_else(|| format!("{ctx} is not an object"))?;
    for k in keys {
        if !map.contains_key(*k) {
            return Err(format!("{ctx} lacks '{k}'"));
        }
    }
    Ok(())
}

/// Checks a parsed JSON document against the published record schema.
pub fn validate_record(doc: &Value) -> std::result::Result<(), String> {
    require_keys(doc, &["schema_version", "command", "inputs", "results", "tool_version"], "record")?;
    if doc["schema_version"] != SCHEMA_VERSION {
        return Err(format!("unsupported schema_version {}", doc["schema_version"]));
    }
    if !doc["tool_version"].is_string() {
        return Err("tool_version is not a string".into());
    }
    let results = &doc["results"];
    match doc["command"].as_str() {
        Some("thresholds") => {
            require_keys(&doc["inputs"], &["n_max"], "inputs")?;
            require_keys(results, &["rows", "limit"], "results")?;
            let rows = results["rows"].as_array().ok_or("rows is not an array")?;
            for r in rows {
                require_keys(r, &["n", "t_n", "mu_n", "residual", "mu_gap"], "row")?;
            }
            require_keys(&results["limit"], &["t", "mu"], "limit")
        }
        Some("analyze") => {
            require_keys(&doc["inputs"], &["spec", "n_max", "abs_tol"], "inputs")?;
            require_keys(results, &["constraints", "report"], "results")?;
            require_keys(
                &results["constraints"],
                &["normalization", "min_value_found", "sup_pi_w", "passes_nonneg", "passes_norm", "passes_pointwise", "purity"],
                "constraints",
            )?;
            if !results["report"].is_null() {
                require_keys(
                    &results["report"],
                    &["mu", "t", "entropy", "descent", "bounds", "purity_only", "var_x", "b2_variance_refined", "verdicts"],
                    "report",
                )?;
            }
            Ok(())
        }
        Some("fuzz") => {
            require_keys(&doc["inputs"], &["seed", "trials", "n_max"], "inputs")?;
            require_keys(results, &["trials_run", "violations", "worst_slacks", "trials"], "results")
        }
        Some("sharpness") => {
            require_keys(&doc["inputs"], &["mu_min", "mu_max", "steps"], "inputs")?;
            let rows = results["rows"].as_array().ok_or("rows is not an array")?;
            for r in rows {
                require_keys(r, &["mu", "entropy_flat", "target", "violates_conjectured_bound", "relation"], "row")?;
            }
            Ok(())
        }
        other => Err(format!("unknown command {other:?}")),
    }
}

/// Threshold table for `n = 2..=n_max` plus the limiting row.
pub fn cmd_thresholds(n_max: usize, format: Format) -> Result<String> {
    let rows = threshold_table(n_max, DEFAULT_TOL)?;
    Ok(match format {
        Format::Csv => table_to_csv(&rows),
        Format::Json => OutputRecord::new(
            "thresholds",
            json!({ "n_max": n_max, "tol": DEFAULT_TOL }),
            json!({
                "rows": rows,
                "limit": { "t": limiting_t(), "mu": limiting_threshold() },
            }),
        )
        .to_json(),
    })
}

/// Result of analyzing one state record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub constraints: ConstraintReport,
    /// Absent when the constraints fail.
    pub report: Option<BoundReport>,
}

/// Parses a state record, checks the constraints, and evaluates the hierarchy.
pub fn analyze_spec(spec: &StateSpec, n_max: usize, cfg: &QuadratureConfig) -> Result<Analysis> {
    let density = spec.build()?;
    let constraints = check_constraints(&density, cfg)?;
    let report = if constraints.all_pass() {
        Some(assess(&density, n_max, cfg)?)
    } else {
        None
    };
    Ok(Analysis { constraints, report })
}

fn analysis_csv(a: &Analysis) -> String {
    let mut out = String::from("n,B_n,B_n_abs_error,purity_only_n,descent_moment_n,verdict_B_n\n");
    if let Some(r) = &a.report {
        for n in 1..=r.n_max {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                n,
                fmt_f64(r.b(n)),
                fmt_f64(r.bounds[n - 1].abs_error),
                fmt_f64(r.purity_only_at(n)),
                fmt_f64(r.descent.get(n)),
                r.verdicts.hierarchy[n - 1].as_str()
            ));
        }
    }
    out
}

/// `analyze` on record text already read from disk.
pub fn analyze_text(text: &str, n_max: usize, cfg: &QuadratureConfig, format: Format) -> Result<CommandOutput> {
    let spec = StateSpec::parse(text)?;
    let analysis = analyze_spec(&spec, n_max, cfg)?;
    let status = if analysis.report.is_some() {
        ExitStatus::Success
    } else {
        ExitStatus::ConstraintFailure
    };
    let text = match format {
        Format::Csv => analysis_csv(&analysis),
        Format::Json => OutputRecord::new(
            "analyze",
            json!({ "spec": spec, "n_max": n_max, "abs_tol": cfg.abs_tol, "target": entropy_target() }),
            serde_json::to_value(&analysis).expect("analysis serializes"),
        )
        .to_json(),
    };
    Ok(CommandOutput { text, status })
}

pub fn cmd_analyze(spec_path: &Path, n_max: usize, cfg: &QuadratureConfig, format: Format) -> Result<CommandOutput> {
    let text = std::fs::read_to_string(spec_path)?;
    analyze_text(&text, n_max, cfg, format)
}

fn fuzz_csv(r: &FuzzReport) -> String {
    let mut out = String::from("property,worst_slack,floor,violations\n");
    for w in &r.worst_slacks {
        let count = r.violations.iter().filter(|v| v.property == w.property).count();
        out.push_str(&format!("{},{},{},{}\n", w.property, fmt_f64(w.slack), fmt_f64(w.floor), count));
    }
    out
}

/// Seeded fuzz run; exits nonzero exactly when a violation was found.
pub fn cmd_fuzz(config: &TrialConfig, format: Format) -> Result<(CommandOutput, FuzzReport)> {
    let report = run_fuzz(config)?;
    let status = if report.violations.is_empty() {
        ExitStatus::Success
    } else {
        ExitStatus::ViolationsFound
    };
    let text = match format {
        Format::Csv => fuzz_csv(&report),
        Format::Json => OutputRecord::new(
            "fuzz",
            json!({
                "seed": config.seed,
                "trials": config.trials,
                "n_max": config.n_max,
                "components_max": config.components_max,
                "center_radius": config.center_radius,
                "abs_tol": config.cfg.abs_tol,
            }),
            serde_json::to_value(&report).expect("report serializes"),
        )
        .to_json(),
    };
    Ok((CommandOutput { text, status }, report))
}

/// Evenly spaced purities in `[mu_min, mu_max]`, plus `2/e` when it lies inside.
pub fn sharpness_grid(mu_min: f64, mu_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(mu_min > 0.0 && mu_min <= mu_max && mu_max <= 2.0) {
        return Err(Error::Domain(format!(
            "need 0 < mu_min <= mu_max <= 2, got [{mu_min}, {mu_max}]"
        )));
    }
    if steps < 1 {
        return Err(Error::Domain("steps must be at least 1".into()));
    }
    let mut grid: Vec<f64> = if steps == 1 {
        vec![mu_min]
    } else {
        (0..steps)
            .map(|i| {
                if i + 1 == steps {
                    mu_max
                } else {
                    mu_min + (mu_max - mu_min) * i as f64 / (steps - 1) as f64
                }
            })
            .collect()
    };
    let limit = limiting_threshold();
    if (mu_min..=mu_max).contains(&limit) && !grid.contains(&limit) {
        grid.push(limit);
        grid.sort_by(f64::total_cmp);
    }
    Ok(grid)
}

fn sharpness_csv(rows: &[SharpnessRow]) -> String {
    let mut out = String::from("mu,entropy_flat,target,violates_conjectured_bound,relation\n");
    for r in rows {
        let rel = match r.relation {
            crate::fuzz::Relation::Above => "above",
            crate::fuzz::Relation::Equal => "equal",
            crate::fuzz::Relation::Below => "below",
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(r.mu),
            fmt_f64(r.entropy_flat),
            fmt_f64(r.target),
            r.violates_conjectured_bound,
            rel
        ));
    }
    out
}

pub fn cmd_sharpness(mu_min: f64, mu_max: f64, steps: usize, format: Format) -> Result<String> {
    let grid = sharpness_grid(mu_min, mu_max, steps)?;
    let rows = sharpness_demo(&grid)?;
    Ok(match format {
        Format::Csv => sharpness_csv(&rows),
        Format::Json => OutputRecord::new(
            "sharpness",
            json!({ "mu_min": mu_min, "mu_max": mu_max, "steps": steps }),
            json!({ "rows": rows, "limit": limiting_threshold() }),
        )
        .to_json(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn grid_includes_limit() {
        let g = sharpness_grid(0.5, 1.0, 6).unwrap();
        assert_eq!(g.len(), 7);
        assert!(g.contains(&limiting_threshold()));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(sharpness_grid(1.0, 0.5, 3).is_err());
        assert!(sharpness_grid(0.0, 0.5, 3).is_err());
        assert!(sharpness_grid(0.1, 2.5, 3).is_err());
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            ExitStatus::Success,
            ExitStatus::Internal,
            ExitStatus::Usage,
            ExitStatus::Parse,
            ExitStatus::ConstraintFailure,
            ExitStatus::NonConvergence,
            ExitStatus::ViolationsFound,
            ExitStatus::Io,
        ]
        .map(ExitStatus::code);
        let mut sorted = codes.to_vec();
        sorted.dedup();
        assert_eq!(sorted.len(), codes.len());
    }

    #[test]
    fn record_validation_rejects_incomplete_documents() {
        assert!(validate_record(&json!({})).is_err());
        let mut doc: Value = serde_json::from_str(&cmd_thresholds(3, Format::Json).unwrap()).unwrap();
        assert!(validate_record(&doc).is_ok());
        doc["results"].as_object_mut().unwrap().remove("limit");
        assert!(validate_record(&doc).is_err());
    }
}
