//! Built-in state families with exact metadata, and the JSON record that names them.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::density::{PhasePoint, WignerDensity};
use crate::error::{Error, Result};
use crate::quadrature::IntegrationDomain;

/// Largest squeezing parameter accepted by [`make_squeezed_vacuum`].
pub const MAX_SQUEEZING: f64 = 5.0;

fn log_inv(eps: f64) -> f64 {
    (1.0 / eps).ln()
}

/// Gaussian `exp(-(q²+p²)/s) / (π s)` with `s = 2n̄ + 1`.
fn isotropic_gaussian(label: String, s: f64) -> WignerDensity {
    let norm = 1.0 / (PI * s);
    WignerDensity::builder(label, move |pt: PhasePoint| norm * (-pt.radius_squared() / s).exp())
        .radial()
        .tail_radius(move |eps| (s * log_inv(eps)).sqrt())
        .declared_sup(norm)
        .entropy(1.0 + PI.ln() + s.ln())
        .purity(1.0 / s)
        .power_moments(move |k| (PI * s).powi(1 - k as i32) / k as f64)
        .descent_moments(move |k| {
            let k1 = k as i32 + 1;
            s / k1 as f64 * (1.0 - (1.0 - 1.0 / s).powi(k1))
        })
        .variance_x(1.0 / (12.0 * s * s))
        .build()
}

/// The vacuum, `W = exp(-(q²+p²)) / π`.
pub fn make_vacuum() -> WignerDensity {
    isotropic_gaussian("vacuum".into(), 1.0)
}

/// Squeezed vacuum `W = exp(-e^{-2r} q² - e^{2r} p²) / π`.
pub fn make_squeezed_vacuum(r: f64) -> Result<WignerDensity> {
    if !r.is_finite() || r.abs() > MAX_SQUEEZING {
        return Err(Error::Domain(format!(
            "squeezing parameter must satisfy |r| <= {MAX_SQUEEZING}, got {r}"
        )));
    }
    if r == 0.0 {
        return Ok(isotropic_gaussian("squeezed_vacuum(r=0)".into(), 1.0));
    }
    let (a, b) = ((-2.0 * r).exp(), (2.0 * r).exp());
    Ok(
        WignerDensity::builder(format!("squeezed_vacuum(r={r})"), move |pt: PhasePoint| {
            (-a * pt.q * pt.q - b * pt.p * pt.p).exp() / PI
        })
        .tail_radius(move |eps| r.abs().exp() * log_inv(eps).sqrt())
        .tail_box(move |eps| {
            let l = log_inv(eps).sqrt();
            let (hq, hp) = (r.exp() * l, (-r).exp() * l);
            IntegrationDomain::Rectangle {
                q_min: -hq,
                q_max: hq,
                p_min: -hp,
                p_max: hp,
            }
        })
        .declared_sup(1.0 / PI)
        .entropy(1.0 + PI.ln())
        .purity(1.0)
        .power_moments(|k| PI.powi(1 - k as i32) / k as f64)
        .descent_moments(|k| 1.0 / (k as f64 + 1.0))
        .variance_x(1.0 / 12.0)
        .build(),
    )
}

/// Thermal state with mean photon number `nbar`.
pub fn make_thermal(nbar: f64) -> Result<WignerDensity> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::Domain(format!("mean photon number must be >= 0, got {nbar}")));
    }
    Ok(isotropic_gaussian(format!("thermal(nbar={nbar})"), 2.0 * nbar + 1.0))
}

fn validate_mixture(weights: &[f64], centers: &[PhasePoint]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::Validation("mixture needs at least one component".into()));
    }
    if weights.len() != centers.len() {
        return Err(Error::Validation(format!(
            "mixture has {} weights but {} centers",
            weights.len(),
            centers.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
        return Err(Error::Validation(format!("mixture weights must be nonnegative, got {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Validation(format!("mixture weights must sum to 1, got {total}")));
    }
    if centers.iter().any(|c| !c.is_finite()) {
        return Err(Error::Validation("mixture centers must be finite".into()));
    }
    Ok(())
}

/// Convex combination of vacuum-shaped Gaussians (coherent states).
pub fn make_coherent_mixture(weights: &[f64], centers: &[PhasePoint]) -> Result<WignerDensity> {
    validate_mixture(weights, centers)?;
    let comps: Vec<(f64, PhasePoint)> = weights.iter().copied().zip(centers.iter().copied()).collect();

    let mut purity = 0.0;
    for (wi, ci) in &comps {
        for (wj, cj) in &comps {
            let d2 = (ci.q - cj.q).powi(2) + (ci.p - cj.p).powi(2);
            purity += wi * wj * (-0.5 * d2).exp();
        }
    }
    let reach = comps.iter().map(|(_, c)| c.radius_squared().sqrt()).fold(0.0, f64::max);
    let (q_lo, q_hi, p_lo, p_hi) = comps.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), (_, pt)| (a.min(pt.q), b.max(pt.q), c.min(pt.p), d.max(pt.p)),
    );
    let radial = comps.iter().all(|(_, c)| c.q == 0.0 && c.p == 0.0);
    let label = format!("coherent_mixture({} components)", comps.len());

    let eval_comps = comps.clone();
    let mut b = WignerDensity::builder(label, move |pt: PhasePoint| {
        eval_comps
            .iter()
            .map(|(w, c)| w * (-((pt.q - c.q).powi(2) + (pt.p - c.p).powi(2))).exp())
            .sum::<f64>()
            / PI
    })
    .tail_radius(move |eps| reach + log_inv(eps).sqrt())
    .purity(purity);
    if radial {
        b = b
            .radial()
            .declared_sup(1.0 / PI)
            .entropy(1.0 + PI.ln())
            .power_moments(|k| PI.powi(1 - k as i32) / k as f64)
            .descent_moments(|k| 1.0 / (k as f64 + 1.0))
            .variance_x(1.0 / 12.0);
    } else {
        b = b.tail_box(move |eps| {
            let l = log_inv(eps).sqrt();
            IntegrationDomain::Rectangle {
                q_min: q_lo - l,
                q_max: q_hi + l,
                p_min: p_lo - l,
                p_max: p_hi + l,
            }
        });
    }
    Ok(b.build())
}

/// Mixture `(1 - p1)|0⟩⟨0| + p1|1⟩⟨1|`; Wigner-nonnegative iff `p1 ≤ 1/2`.
pub fn make_fock01_mixture(p1: f64) -> Result<WignerDensity> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::Domain(format!("Fock-1 weight must lie in [0, 1], got {p1}")));
    }
    let a = 1.0 - 2.0 * p1;
    let b = 2.0 * p1;
    let sup = if p1 <= 0.25 {
        a / PI
    } else {
        let u = (4.0 * p1 - 1.0) / (2.0 * p1);
        b * (-u).exp() / PI
    };
    let d = WignerDensity::builder(format!("fock01(p1={p1})"), move |pt: PhasePoint| {
        let u = pt.radius_squared();
        (-u).exp() * (a + b * u) / PI
    })
    .radial()
    .tail_radius(move |eps| {
        // mass beyond u = r² is e^{-u}(a + b(u + 1)); fixed point of u = ln((|a| + b(u+1))/eps)
        let mut u = log_inv(eps);
        for _ in 0..50 {
            u = ((a.abs() + b * (u + 1.0)) / eps).ln().max(0.0);
        }
        u.sqrt()
    })
    .declared_sup(sup)
    .purity(p1 * p1 + (1.0 - p1) * (1.0 - p1));
    let d = if p1 == 0.0 {
        d.entropy(1.0 + PI.ln())
            .power_moments(|k| PI.powi(1 - k as i32) / k as f64)
            .descent_moments(|k| 1.0 / (k as f64 + 1.0))
            .variance_x(1.0 / 12.0)
    } else {
        d
    };
    Ok(d.build())
}

/// Constant `μ/(2π)` on the disk of radius `√(2/μ)`, zero outside.
pub fn make_flat_top(mu: f64) -> Result<WignerDensity> {
    if !(mu > 0.0 && mu <= 2.0) {
        return Err(Error::Domain(format!("flat-top purity must lie in (0, 2], got {mu}")));
    }
    let radius = (2.0 / mu).sqrt();
    let r2 = radius * radius;
    let height = mu / (2.0 * PI);
    Ok(WignerDensity::builder(format!("flat_top(mu={mu})"), move |pt: PhasePoint| {
        if pt.radius_squared() <= r2 {
            height
        } else {
            0.0
        }
    })
    .radial()
    .disk_support(radius)
    .declared_sup(height)
    .entropy((2.0 * PI / mu).ln())
    .purity(mu)
    .power_moments(move |k| height.powi(k as i32 - 1))
    .descent_moments(move |k| (1.0 - mu / 2.0).powi(k as i32))
    .variance_x(0.0)
    .build())
}

/// Declarative description of a built-in state, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Vacuum {},
    SqueezedVacuum { r: f64 },
    Thermal { nbar: f64 },
    Mixture { weights: Vec<f64>, centers: Vec<[f64; 2]> },
    #[serde(rename = "fock01")]
    Fock01 { p1: f64 },
    FlatTop { mu: f64 },
}

impl StateSpec {
    /// Parses a JSON record; syntax and schema errors carry their position.
    pub fn parse(text: &str) -> Result<Self> {
        let strip = |e: serde_json::Error| {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            Error::Parse {
                line: e.line(),
                column: e.column(),
                message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
            }
        };
        // Syntax errors keep their position; tagged-enum schema errors have none.
        let value: serde_json::Value = serde_json::from_str(text).map_err(strip)?;
        serde_json::from_value(value).map_err(strip)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StateSpec::Vacuum {} => Ok(()),
            StateSpec::SqueezedVacuum { r } => {
                if r.is_finite() && r.abs() <= MAX_SQUEEZING {
                    Ok(())
                } else {
                    Err(Error::Validation(format!(
                        "squeezed_vacuum.r must be finite with |r| <= {MAX_SQUEEZING}, got {r}"
                    )))
                }
            }
            StateSpec::Thermal { nbar } => {
                if *nbar >= 0.0 && nbar.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Validation(format!("thermal.nbar must be >= 0, got {nbar}")))
                }
            }
            StateSpec::Mixture { weights, centers } => {
                let pts: Vec<PhasePoint> = centers.iter().map(|c| PhasePoint::new(c[0], c[1])).collect();
                validate_mixture(weights, &pts)
            }
            StateSpec::Fock01 { p1 } => {
                if (0.0..=1.0).contains(p1) {
                    Ok(())
                } else {
                    Err(Error::Validation(format!("fock01.p1 must lie in [0, 1], got {p1}")))
                }
            }
            StateSpec::FlatTop { mu } => {
                if *mu > 0.0 && *mu <= 2.0 {
                    Ok(())
                } else {
                    Err(Error::Validation(format!("flat_top.mu must lie in (0, 2], got {mu}")))
                }
            }
        }
    }

    pub fn build(&self) -> Result<WignerDensity> {
        self.validate()?;
        match self {
            StateSpec::Vacuum {} => Ok(make_vacuum()),
            StateSpec::SqueezedVacuum { r } => make_squeezed_vacuum(*r),
            StateSpec::Thermal { nbar } => make_thermal(*nbar),
            StateSpec::Mixture { weights, centers } => {
                let pts: Vec<PhasePoint> = centers.iter().map(|c| PhasePoint::new(c[0], c[1])).collect();
                make_coherent_mixture(weights, &pts)
            }
            StateSpec::Fock01 { p1 } => make_fock01_mixture(*p1),
            StateSpec::FlatTop { mu } => make_flat_top(*mu),
        }
    }
}

/// Parses a state record and builds the density it names.
pub fn parse_state_spec(text: &str) -> Result<WignerDensity> {
    StateSpec::parse(text)?.build()
}
