//! The hierarchy `B_n = ln π + Σ_{k≤n} m_k / k`, its purity-only relaxation,
//! the variance-refined second-order bound, and sufficiency verdicts for
//! `S ≥ 1 + ln π`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::density::WignerDensity;
use crate::error::{Error, Result};
use crate::functionals::{self, DescentMoments, PassRequest};
use crate::quadrature::{compensated_sum, FunctionalEstimate, Method, QuadratureConfig};
use crate::threshold::{limiting_threshold, partial_log_sum};

/// Default hierarchy depth.
pub const DEFAULT_N_MAX: usize = 64;

/// `1 + ln π`, the entropy of every pure Gaussian state.
pub fn entropy_target() -> f64 {
    1.0 + PI.ln()
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu <= 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("purity must lie in (0, 2], got {mu}")))
    }
}

/// `B_1 = 1 + ln π - μ/2`.
pub fn bound_b1(mu: f64) -> Result<f64> {
    check_mu(mu)?;
    Ok(1.0 + PI.ln() - 0.5 * mu)
}

/// `ln π + Σ_{k≤n} t^k / k` with `t = 1 - μ/2`, a lower bound on `B_n` for `n ≥ 2`.
pub fn purity_only_bound(mu: f64, n: usize) -> Result<f64> {
    check_mu(mu)?;
    if n < 2 {
        return Err(Error::Domain(format!("purity-only bound needs n >= 2, got {n}")));
    }
    Ok(PI.ln() + partial_log_sum(1.0 - 0.5 * mu, n)?)
}

fn refined_b2_unchecked(mu: f64, var_x: f64) -> f64 {
    let t = 1.0 - 0.5 * mu;
    PI.ln() + t + 0.5 * t * t + 0.5 * var_x
}

/// `ln π + t + t²/2 + Var(X)/2`; equal to `B_2` for a consistent `(μ, Var X)` pair.
pub fn variance_refined_b2(mu: f64, var_x: f64) -> Result<f64> {
    check_mu(mu)?;
    if !(var_x >= 0.0 && var_x.is_finite()) {
        return Err(Error::Domain(format!("Var(X) must be nonnegative, got {var_x}")));
    }
    Ok(refined_b2_unchecked(mu, var_x))
}

/// Prefix sums `ln π + Σ_{k≤n} m_k / k` for `n = 1..=n_max`, with propagated errors.
fn hierarchy_from_moments(m: &DescentMoments) -> Vec<FunctionalEstimate> {
    let exact = m.values.iter().all(|v| v.method == Method::ClosedForm);
    let mut terms = vec![PI.ln()];
    let mut err = 0.0;
    m.values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let k = (i + 1) as f64;
            terms.push(v.value / k);
            err += v.abs_error / k;
            let value = compensated_sum(terms.iter().copied());
            if exact {
                FunctionalEstimate::exact(value)
            } else {
                FunctionalEstimate::numeric(value, err)
            }
        })
        .collect()
}

/// `B_n` for one density.
pub fn bound_bn(density: &WignerDensity, n: usize, cfg: &QuadratureConfig) -> Result<FunctionalEstimate> {
    if n < 1 {
        return Err(Error::Domain("hierarchy order must be at least 1".into()));
    }
    let m = functionals::descent_moments(density, n, cfg)?;
    Ok(*hierarchy_from_moments(&m).last().expect("n >= 1"))
}

/// Whether a bound certifies `S ≥ 1 + ln π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "guaranteed")]
    Guaranteed,
    #[serde(rename = "not guaranteed by these bounds")]
    NotGuaranteed,
    /// Within the error estimate of the target.
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Verdict {
    /// Compares `value ± err` against the target, leaving a few ulps of slack for exact values.
    pub fn of(value: f64, err: f64, target: f64) -> Self {
        let err = err + 4.0 * f64::EPSILON * target.abs();
        if value - err >= target {
            Verdict::Guaranteed
        } else if value + err < target {
            Verdict::NotGuaranteed
        } else {
            Verdict::Inconclusive
        }
    }

    pub fn is_guaranteed(self) -> bool {
        self == Verdict::Guaranteed
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Guaranteed => "guaranteed",
            Verdict::NotGuaranteed => "not guaranteed by these bounds",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdicts {
    /// `B_n ≥ 1 + ln π`, for `n = 1..=n_max`.
    pub hierarchy: Vec<Verdict>,
    /// Purity-only bound of order `n ≥ 1` against the target.
    pub purity_only: Vec<Verdict>,
    /// `μ ≤ 2/e`.
    pub purity_only_limit: Verdict,
    pub variance_refined: Verdict,
    pub first_guaranteed_order: Option<usize>,
    pub overall: Verdict,
}

/// Every hierarchy quantity for one density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub label: String,
    pub n_max: usize,
    pub target: f64,
    pub mu: FunctionalEstimate,
    pub t: f64,
    pub entropy: FunctionalEstimate,
    pub descent: DescentMoments,
    /// `B_n` for `n = 1..=n_max`.
    pub bounds: Vec<FunctionalEstimate>,
    /// `ln π + Σ_{k≤n} t^k/k` for `n = 1..=n_max`; the `n = 1` entry equals `B_1`.
    pub purity_only: Vec<f64>,
    pub var_x: FunctionalEstimate,
    pub b2_variance_refined: f64,
    /// `|B_2 - (ln π + t + t²/2 + Var(X)/2)|`
    pub identity_residual: f64,
    pub verdicts: Verdicts,
}

impl BoundReport {
    /// `B_n`, one-based.
    pub fn b(&self, n: usize) -> f64 {
        self.bounds[n - 1].value
    }

    pub fn purity_only_at(&self, n: usize) -> f64 {
        self.purity_only[n - 1]
    }
}

/// Moments drawn from one consistent source: closed forms, or one quadrature pass.
struct MomentSet {
    mu: FunctionalEstimate,
    var_x: FunctionalEstimate,
    descent: DescentMoments,
    entropy: FunctionalEstimate,
}

fn gather(density: &WignerDensity, n_max: usize, cfg: &QuadratureConfig) -> Result<MomentSet> {
    let cf = density.closed_forms();
    let closed_entropy = cf.entropy.filter(|_| cfg.use_closed_forms);
    if cfg.use_closed_forms && cf.has_moment_set() {
        let descent = functionals::descent_moments(density, n_max, cfg)?;
        let entropy = match closed_entropy {
            Some(s) => FunctionalEstimate::exact(s),
            None => functionals::entropy(density, cfg)?,
        };
        return Ok(MomentSet {
            mu: FunctionalEstimate::exact(cf.purity.expect("moment set")),
            var_x: FunctionalEstimate::exact(cf.variance_x.expect("moment set")),
            descent,
            entropy,
        });
    }
    let req = PassRequest {
        entropy: closed_entropy.is_none(),
        powers: vec![2, 3],
        descent_max: n_max,
    };
    let pass = functionals::moment_pass(density, &req, cfg)?;
    let w2 = pass.powers[0];
    let w3 = pass.powers[1];
    Ok(MomentSet {
        mu: FunctionalEstimate::numeric(2.0 * PI * w2.value, 2.0 * PI * w2.abs_error),
        var_x: functionals::variance_from_moments(w2, w3),
        descent: DescentMoments {
            n_max,
            values: pass.descent,
        },
        entropy: match closed_entropy {
            Some(s) => FunctionalEstimate::exact(s),
            None => pass.entropy.expect("entropy requested"),
        },
    })
}

/// Evaluates the full hierarchy, its relaxations, and the verdicts.
pub fn assess(density: &WignerDensity, n_max: usize, cfg: &QuadratureConfig) -> Result<BoundReport> {
    if n_max < 2 {
        return Err(Error::Domain(format!("assessment needs n_max >= 2, got {n_max}")));
    }
    let set = gather(density, n_max, cfg)?;
    let mu = set.mu;
    if !(mu.value > 0.0 && mu.value <= 2.0 + 1e-8) {
        return Err(Error::InvalidInput(format!(
            "purity {} of '{}' is outside (0, 2]",
            mu.value,
            density.label()
        )));
    }
    let target = entropy_target();
    let t = (1.0 - 0.5 * mu.value).clamp(0.0, 1.0);
    let t_err = 0.5 * mu.abs_error;

    let bounds = hierarchy_from_moments(&set.descent);
    let mut purity_only = Vec::with_capacity(n_max);
    let mut po_err = Vec::with_capacity(n_max);
    let mut dsum = 0.0;
    for n in 1..=n_max {
        purity_only.push(PI.ln() + partial_log_sum(t, n)?);
        dsum += t.powi(n as i32 - 1);
        po_err.push(t_err * dsum);
    }

    let b2 = bounds[1];
    let refined = refined_b2_unchecked(mu.value, set.var_x.value);
    let identity_residual = (b2.value - refined).abs();

    let hierarchy: Vec<Verdict> = bounds.iter().map(|b| Verdict::of(b.value, b.abs_error, target)).collect();
    let po_verdicts: Vec<Verdict> = purity_only
        .iter()
        .zip(&po_err)
        .map(|(v, e)| Verdict::of(*v, *e, target))
        .collect();
    // μ ≤ 2/e  ⇔  -μ ≥ -2/e
    let limit = Verdict::of(-mu.value, mu.abs_error, -limiting_threshold());
    let variance_refined = Verdict::of(refined, b2.abs_error + 0.5 * set.var_x.abs_error + t_err * 2.0, target);
    let first_guaranteed_order = hierarchy.iter().position(|v| v.is_guaranteed()).map(|i| i + 1);
    let all = hierarchy
        .iter()
        .chain(&po_verdicts)
        .chain([&limit, &variance_refined]);
    let overall = all.fold(Verdict::NotGuaranteed, |acc, v| match (acc, v) {
        (Verdict::Guaranteed, _) | (_, Verdict::Guaranteed) => Verdict::Guaranteed,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::NotGuaranteed,
    });

    Ok(BoundReport {
        label: density.label().to_string(),
        n_max,
        target,
        mu,
        t,
        entropy: set.entropy,
        descent: set.descent,
        bounds,
        purity_only,
        var_x: set.var_x,
        b2_variance_refined: refined,
        identity_residual,
        verdicts: Verdicts {
            hierarchy,
            purity_only: po_verdicts,
            purity_only_limit: limit,
            variance_refined,
            first_guaranteed_order,
            overall,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_flat_top, make_thermal, make_vacuum};

    #[test]
    fn b1_closed_form() {
        let target = entropy_target();
        assert!((bound_b1(1.0).unwrap() - (target - 0.5)).abs() < 1e-15);
        assert!((bound_b1(1e-300).unwrap() - target).abs() < 1e-15);
        assert!((bound_b1(2.0).unwrap() - PI.ln()).abs() < 1e-15);
        assert!(bound_b1(0.0).is_err());
        assert!(bound_b1(2.5).is_err());
    }

    #[test]
    fn purity_only_values() {
        assert!((purity_only_bound(2.0, 7).unwrap() - PI.ln()).abs() < 1e-15);
        let mu2 = 4.0 - 2.0 * 3f64.sqrt();
        assert!((purity_only_bound(mu2, 2).unwrap() - entropy_target()).abs() < 1e-14);
        let v = purity_only_bound(limiting_threshold(), 2000).unwrap();
        assert!((v - entropy_target()).abs() < 1e-13);
        assert!(purity_only_bound(0.5, 1).is_err());
    }

    #[test]
    fn refined_b2_values() {
        let po2 = purity_only_bound(0.7, 2).unwrap();
        assert!((variance_refined_b2(0.7, 0.0).unwrap() - po2).abs() < 1e-15);
        let v = variance_refined_b2(1.0, 1.0 / 12.0).unwrap();
        assert!((v - (PI.ln() + 0.5 + 0.125 + 1.0 / 24.0)).abs() < 1e-15);
        assert!((variance_refined_b2(2.0, 0.0).unwrap() - PI.ln()).abs() < 1e-15);
        assert!(variance_refined_b2(1.0, -0.1).is_err());
    }

    #[test]
    fn vacuum_closed_form_hierarchy() {
        let r = assess(&make_vacuum(), 16, &QuadratureConfig::default()).unwrap();
        for n in 1..=16 {
            assert!((r.b(n) - (PI.ln() + n as f64 / (n as f64 + 1.0))).abs() < 1e-14);
            assert_eq!(r.verdicts.hierarchy[n - 1], Verdict::NotGuaranteed);
        }
        assert_eq!(r.verdicts.overall, Verdict::NotGuaranteed);
        assert!(r.identity_residual < 1e-15);
    }

    #[test]
    fn thermal_half_is_guaranteed_at_second_order() {
        let r = assess(&make_thermal(0.5).unwrap(), 8, &QuadratureConfig::default()).unwrap();
        assert_eq!(r.verdicts.hierarchy[1], Verdict::Guaranteed);
        assert_eq!(r.verdicts.purity_only[1], Verdict::Guaranteed);
        assert_eq!(r.verdicts.first_guaranteed_order, Some(2));
        assert_eq!(r.verdicts.overall, Verdict::Guaranteed);
    }

    #[test]
    fn flat_top_above_limit_fails_everywhere() {
        let r = assess(&make_flat_top(0.9).unwrap(), DEFAULT_N_MAX, &QuadratureConfig::default()).unwrap();
        assert!(r.entropy.value < r.target);
        assert!(r.verdicts.hierarchy.iter().all(|v| *v == Verdict::NotGuaranteed));
        assert_eq!(r.verdicts.purity_only_limit, Verdict::NotGuaranteed);
        assert_eq!(r.verdicts.overall, Verdict::NotGuaranteed);
        for n in 2..=DEFAULT_N_MAX {
            assert!((r.b(n) - r.purity_only_at(n)).abs() < 1e-14);
        }
    }

    #[test]
    fn verdict_borderline_is_inconclusive() {
        assert_eq!(Verdict::of(1.0, 0.0, 1.0), Verdict::Inconclusive);
        assert_eq!(Verdict::of(1.0 + 1e-9, 1e-8, 1.0), Verdict::Inconclusive);
        assert_eq!(Verdict::of(1.1, 1e-8, 1.0), Verdict::Guaranteed);
        assert_eq!(Verdict::of(0.9, 1e-8, 1.0), Verdict::NotGuaranteed);
    }

    #[test]
    fn n_max_must_be_two_or_more() {
        assert!(assess(&make_vacuum(), 1, &QuadratureConfig::default()).is_err());
    }
}
