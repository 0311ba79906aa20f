//! Purity thresholds: roots of `Σ_{k≤n} t^k/k = 1` and the resulting `μ_n = 2(1 - t_n)`.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::fmt_f64;

/// Default residual target for [`solve_t_n`].
pub const DEFAULT_TOL: f64 = 1e-14;

/// `1 - 1/e`, the limit of `t_n`.
pub fn limiting_t() -> f64 {
    1.0 - 1.0 / E
}

/// `2/e`, the purity threshold obtained as `n → ∞`.
pub fn limiting_threshold() -> f64 {
    2.0 / E
}

/// One row of the threshold table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    pub n: usize,
    pub t_n: f64,
    pub mu_n: f64,
    pub residual: f64,
    /// `2/e - μ_n`, computed without cancellation.
    ///
    /// Beyond `n ≈ 80` consecutive `μ_n` agree to all 53 bits, but their
    /// distances to the limit remain distinct until they underflow.
    pub mu_gap: f64,
}

/// `Σ_{k=1}^{n} t^k / k` with incrementally built powers and compensated summation.
pub fn partial_log_sum(t: f64, n: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t must lie in [0, 1], got {t}")));
    }
    if n < 1 {
        return Err(Error::Domain("series order must be at least 1".into()));
    }
    Ok(log_sum_unchecked(t, n))
}

fn log_sum_unchecked(t: f64, n: usize) -> f64 {
    let (mut sum, mut c, mut pow) = (0.0_f64, 0.0_f64, 1.0_f64);
    for k in 1..=n {
        pow *= t;
        if pow == 0.0 {
            break;
        }
        let term = pow / k as f64;
        let s = sum + term;
        c += if sum.abs() >= term { (sum - s) + term } else { (term - s) + sum };
        sum = s;
    }
    sum + c
}

/// `Σ_{k>n} t^k / k` for `t < 1`.
fn log_tail(t: f64, n: usize) -> f64 {
    let mut pow = t.powi(n as i32);
    let mut sum = 0.0;
    let mut k = n + 1;
    loop {
        pow *= t;
        let term = pow / k as f64;
        if term == 0.0 || term < sum * 1e-18 {
            break;
        }
        sum += term;
        k += 1;
    }
    sum
}

/// Unique root `t_n ∈ (0, 1)` of `Σ_{k≤n} t^k/k = 1`, by bisection with a Newton polish.
pub fn solve_t_n(n: usize, tol: f64) -> Result<ThresholdEntry> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "threshold order must be at least 2 (order 1 gives no sufficient condition), got {n}"
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let f = |t: f64| log_sum_unchecked(t, n) - 1.0;
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
    let mut residual = f(t).abs();

    // one Newton step; derivative is Σ t^{k-1}
    let deriv: f64 = (0..n).scan(1.0, |p, _| {
        let v = *p;
        *p *= t;
        Some(v)
    })
    .sum();
    let candidate = t - f(t) / deriv;
    if (0.0..=1.0).contains(&candidate) && f(candidate).abs() < residual {
        t = candidate;
        residual = f(t).abs();
    }

    if residual > tol {
        return Err(Error::NonConvergence {
            what: format!("threshold t_{n}"),
            value: t,
            abs_error: residual,
        });
    }
    let mu_gap = limiting_threshold() * -(-log_tail(t, n)).exp_m1();
    Ok(ThresholdEntry {
        n,
        t_n: t,
        mu_n: 2.0 * (1.0 - t),
        residual,
        mu_gap,
    })
}

/// `μ_n = 2(1 - t_n)`.
pub fn mu_threshold(n: usize, tol: f64) -> Result<f64> {
    Ok(solve_t_n(n, tol)?.mu_n)
}

/// Threshold `4 - 2√(3 - v0)` when `Var(X) ≥ v0`.
pub fn variance_threshold(v0: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&v0) {
        return Err(Error::Domain(format!("variance floor must lie in [0, 1], got {v0}")));
    }
    Ok(4.0 - 2.0 * (3.0 - v0).sqrt())
}

/// Entries for `n = 2..=n_max`.
pub fn threshold_table(n_max: usize, tol: f64) -> Result<Vec<ThresholdEntry>> {
    if n_max < 2 {
        return Err(Error::Domain(format!("table needs n_max >= 2, got {n_max}")));
    }
    (2..=n_max).map(|n| solve_t_n(n, tol)).collect()
}

/// CSV with header `n,t_n,mu_n,residual` and a closing `inf` row.
pub fn table_to_csv(entries: &[ThresholdEntry]) -> String {
    let mut out = String::from("n,t_n,mu_n,residual\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.n,
            fmt_f64(e.t_n),
            fmt_f64(e.mu_n),
            fmt_f64(e.residual)
        ));
    }
    out.push_str(&format!(
        "inf,{},{},{}\n",
        fmt_f64(limiting_t()),
        fmt_f64(limiting_threshold()),
        fmt_f64(0.0)
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_sums() {
        assert_eq!(partial_log_sum(0.0, 5).unwrap(), 0.0);
        let t = 3f64.sqrt() - 1.0;
        assert!((partial_log_sum(t, 2).unwrap() - 1.0).abs() < 1e-15);
        let s = partial_log_sum(limiting_t(), 400).unwrap();
        assert!((s - 1.0).abs() < 1e-14);
        assert!(partial_log_sum(1.1, 2).is_err());
        assert!(partial_log_sum(0.5, 0).is_err());
    }

    #[test]
    fn second_order_closed_form() {
        let e = solve_t_n(2, DEFAULT_TOL).unwrap();
        assert!((e.t_n - (3f64.sqrt() - 1.0)).abs() <= 1e-14);
        assert!((e.mu_n - (4.0 - 2.0 * 3f64.sqrt())).abs() <= 1e-14);
        assert!((e.mu_gap - (limiting_threshold() - e.mu_n)).abs() < 1e-15);
    }

    #[test]
    fn order_one_is_rejected() {
        assert!(matches!(solve_t_n(1, DEFAULT_TOL), Err(Error::Domain(_))));
        assert!(threshold_table(1, DEFAULT_TOL).is_err());
    }

    #[test]
    fn variance_thresholds() {
        assert!((variance_threshold(0.0).unwrap() - (4.0 - 2.0 * 3f64.sqrt())).abs() < 1e-15);
        assert!((variance_threshold(1.0).unwrap() - (4.0 - 2.0 * 2f64.sqrt())).abs() < 1e-15);
        assert!((variance_threshold(0.5).unwrap() - (4.0 - 2.0 * 2.5f64.sqrt())).abs() < 1e-15);
        assert!(variance_threshold(-0.1).is_err());
        assert!(variance_threshold(1.5).is_err());
    }

    #[test]
    fn limit_identity() {
        assert!((2.0 * (1.0 - limiting_t()) - limiting_threshold()).abs() < 1e-16);
        assert!((limiting_threshold() - 0.735_758_88).abs() < 1e-8);
    }

    #[test]
    fn csv_layout() {
        let csv = table_to_csv(&threshold_table(3, DEFAULT_TOL).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,t_n,mu_n,residual");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("2,7.32050807568877"));
        assert!(lines[3].starts_with("inf,"));
        assert!(lines.iter().all(|l| l.split(',').count() == 4));
        let mu: f64 = lines[3].split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(mu, limiting_threshold());
    }
}
