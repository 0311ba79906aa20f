//! Functionals of a phase-space density: entropy, purity, power and descent
//! moments, the variance of `X = πW`, and the admissibility checks
//! (nonnegativity, normalization, `πW ≤ 1`).
//!
//! All numeric functionals go through [`moment_pass`], which integrates every
//! requested quantity over one shared set of nodes. Descent moments are
//! accumulated incrementally at each node, so `m_{k+1}` and `m_k` differ by
//! exactly the integral of `W (1 - X)^k X` on those nodes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::density::{PhasePoint, WignerDensity};
use crate::error::{Error, Result};
use crate::quadrature::{self, FunctionalEstimate, Partial, QuadratureConfig};

/// Values in `[-NEGATIVE_FLOOR, 0)` are treated as numerical noise.
pub const NEGATIVE_FLOOR: f64 = 1e-12;
/// Allowed excess of `πW` over 1.
pub const POINTWISE_SLACK: f64 = 1e-9;
/// Below this, `x ln x` is taken to be 0.
const LOG_GUARD: f64 = 1e-300;
/// Points per axis in the extremum scan.
const SCAN_POINTS: usize = 201;

/// `W(q, p)` at a finite point.
pub fn evaluate(density: &WignerDensity, point: PhasePoint) -> f64 {
    debug_assert!(point.is_finite());
    density.evaluate(point)
}

/// Which functionals one integration pass should produce.
#[derive(Debug, Clone, Default)]
pub(crate) struct PassRequest {
    pub entropy: bool,
    pub powers: Vec<u32>,
    pub descent_max: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct PassResult {
    pub mass: FunctionalEstimate,
    pub entropy: Option<FunctionalEstimate>,
    pub powers: Vec<FunctionalEstimate>,
    pub descent: Vec<FunctionalEstimate>,
}

impl PassRequest {
    fn dim(&self) -> usize {
        1 + usize::from(self.entropy) + self.powers.len() + self.descent_max
    }

    /// Fills `out` with the integrands at a node where the density equals `raw`.
    #[inline]
    fn fill(&self, raw: f64, out: &mut [f64]) {
        let negative = raw < -NEGATIVE_FLOOR;
        let w = if raw < 0.0 && !negative { 0.0 } else { raw };
        out[0] = w;
        let mut i = 1;
        if self.entropy {
            out[i] = if negative {
                f64::NAN
            } else if w < LOG_GUARD {
                0.0
            } else {
                -w * w.ln()
            };
            i += 1;
        }
        for &k in &self.powers {
            out[i] = w.powi(k as i32);
            i += 1;
        }
        if self.descent_max > 0 {
            let x = PI * w;
            if negative || x > 1.0 + POINTWISE_SLACK {
                out[i..].iter_mut().for_each(|v| *v = f64::NAN);
                return;
            }
            let d = 1.0 - x.min(1.0);
            let mut acc = w;
            for slot in &mut out[i..i + self.descent_max] {
                acc *= d;
                *slot = acc;
            }
        }
    }

    fn split(&self, mut values: Vec<FunctionalEstimate>, tail_epsilon: f64) -> PassResult {
        let mut it = values.drain(..);
        let mut mass = it.next().expect("mass component");
        mass.abs_error += tail_epsilon;
        // ∫_tail W^k and ∫_tail W(1-πW)^k are at most the tail mass when πW ≤ 1.
        // The entropy tail uses the Gaussian profile: ε (ln(1/ε) + 1 + ln π).
        let entropy_tail = tail_epsilon * (1.0 - tail_epsilon.ln() + PI.ln());
        let entropy = if self.entropy {
            it.next().map(|mut e| {
                e.abs_error += entropy_tail;
                e
            })
        } else {
            None
        };
        let widen = |mut e: FunctionalEstimate| {
            e.abs_error += tail_epsilon;
            e
        };
        let powers: Vec<_> = it.by_ref().take(self.powers.len()).map(widen).collect();
        let descent: Vec<_> = it.map(widen).collect();
        PassResult {
            mass,
            entropy,
            powers,
            descent,
        }
    }
}

fn run_pass(
    density: &WignerDensity,
    request: &PassRequest,
    cfg: &QuadratureConfig,
) -> std::result::Result<PassResult, Partial> {
    let dim = request.dim();
    let values = if density.is_radial() {
        let r_max = density.radial_cutoff(cfg.tail_epsilon)?;
        let profile = |r: f64, out: &mut [f64]| request.fill(density.evaluate(PhasePoint::new(r, 0.0)), out);
        quadrature::radial_pass(dim, &profile, r_max, cfg)
    } else {
        let domain = density.integration_domain(cfg.tail_epsilon)?;
        let integrand = |pt: PhasePoint, out: &mut [f64]| request.fill(density.evaluate(pt), out);
        quadrature::plane_pass(dim, &integrand, &domain, cfg)
    };
    match values {
        Ok(v) => Ok(request.split(v, cfg.tail_epsilon)),
        Err(Partial {
            error: Error::InvalidInput(_),
            ..
        }) => Err(Error::InvalidInput(format!(
            "'{}' is negative beyond {NEGATIVE_FLOOR:e} or exceeds πW ≤ 1 at a quadrature node",
            density.label()
        ))
        .into()),
        Err(p) => Err(p),
    }
}

/// Integrates every requested functional over one shared set of nodes.
pub(crate) fn moment_pass(
    density: &WignerDensity,
    request: &PassRequest,
    cfg: &QuadratureConfig,
) -> Result<PassResult> {
    run_pass(density, request, cfg).map_err(|p| p.error)
}

/// `S[W] = -∫ W ln W`.
pub fn entropy(density: &WignerDensity, cfg: &QuadratureConfig) -> Result<FunctionalEstimate> {
    if cfg.use_closed_forms {
        if let Some(s) = density.closed_forms().entropy {
            return Ok(FunctionalEstimate::exact(s));
        }
    }
    let req = PassRequest {
        entropy: true,
        ..PassRequest::default()
    };
    let r = moment_pass(density, &req, cfg)?;
    Ok(r.entropy.expect("entropy requested"))
}

/// `μ = 2π ∫ W²`.
pub fn purity(density: &WignerDensity, cfg: &QuadratureConfig) -> Result<FunctionalEstimate> {
    if cfg.use_closed_forms {
        if let Some(mu) = density.closed_forms().purity {
            return Ok(FunctionalEstimate::exact(mu));
        }
    }
    let req = PassRequest {
        powers: vec![2],
        ..PassRequest::default()
    };
    let r = moment_pass(density, &req, cfg)?;
    Ok(scale(r.powers[0], 2.0 * PI))
}

/// `∫ W^k` for `k ≥ 1`.
pub fn power_moment(density: &WignerDensity, k: u32, cfg: &QuadratureConfig) -> Result<FunctionalEstimate> {
    if k < 1 {
        return Err(Error::Domain("power moment order must be at least 1".into()));
    }
    if cfg.use_closed_forms {
        if let Some(f) = &density.closed_forms().power_moment {
            return Ok(FunctionalEstimate::exact(f(k)));
        }
    }
    let req = PassRequest {
        powers: vec![k],
        ..PassRequest::default()
    };
    Ok(moment_pass(density, &req, cfg)?.powers[0])
}

/// `m_k = E[(1 - X)^k]` for `k = 1..=n_max`, with `X = πW` and `(q, p) ~ W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescentMoments {
    pub n_max: usize,
    pub values: Vec<FunctionalEstimate>,
}

impl DescentMoments {
    /// `m_k`, one-based.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k - 1].value
    }

    pub fn error(&self, k: usize) -> f64 {
        self.values[k - 1].abs_error
    }
}

pub fn descent_moments(density: &WignerDensity, n_max: usize, cfg: &QuadratureConfig) -> Result<DescentMoments> {
    if n_max < 1 {
        return Err(Error::Domain("descent moment order must be at least 1".into()));
    }
    if cfg.use_closed_forms {
        if let Some(f) = &density.closed_forms().descent_moment {
            return Ok(DescentMoments {
                n_max,
                values: (1..=n_max as u32).map(|k| FunctionalEstimate::exact(f(k))).collect(),
            });
        }
    }
    let req = PassRequest {
        descent_max: n_max,
        ..PassRequest::default()
    };
    let r = moment_pass(density, &req, cfg)?;
    Ok(DescentMoments {
        n_max,
        values: r.descent,
    })
}

/// `Var(X) = π² ∫ W³ - (μ/2)²`.
pub fn variance_of_x(density: &WignerDensity, cfg: &QuadratureConfig) -> Result<FunctionalEstimate> {
    if cfg.use_closed_forms {
        if let Some(v) = density.closed_forms().variance_x {
            return Ok(FunctionalEstimate::exact(v));
        }
    }
    let req = PassRequest {
        powers: vec![2, 3],
        ..PassRequest::default()
    };
    let r = moment_pass(density, &req, cfg)?;
    Ok(variance_from_moments(r.powers[0], r.powers[1]))
}

pub(crate) fn variance_from_moments(w2: FunctionalEstimate, w3: FunctionalEstimate) -> FunctionalEstimate {
    let ex = PI * w2.value;
    let value = PI * PI * w3.value - ex * ex;
    let err = PI * PI * w3.abs_error + 2.0 * ex.abs() * PI * w2.abs_error;
    FunctionalEstimate::numeric(value, err)
}

fn scale(e: FunctionalEstimate, factor: f64) -> FunctionalEstimate {
    FunctionalEstimate {
        value: e.value * factor,
        abs_error: e.abs_error * factor.abs(),
        method: e.method,
    }
}

/// Outcome of checking nonnegativity, normalization and the pointwise bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub normalization: FunctionalEstimate,
    pub min_value_found: f64,
    pub sup_pi_w: f64,
    pub passes_nonneg: bool,
    pub passes_norm: bool,
    pub passes_pointwise: bool,
    pub purity: FunctionalEstimate,
    pub notes: Vec<String>,
}

impl ConstraintReport {
    pub fn all_pass(&self) -> bool {
        self.passes_nonneg && self.passes_norm && self.passes_pointwise
    }
}

#[derive(Debug, Clone, Copy)]
struct Extrema {
    min: f64,
    max: f64,
}

/// Grid scan over `box` followed by compass-search polishing of the best points.
fn scan_extrema(density: &WignerDensity, (q0, q1, p0, p1): (f64, f64, f64, f64)) -> Extrema {
    let n = SCAN_POINTS;
    let hq = (q1 - q0) / (n - 1) as f64;
    let hp = (p1 - p0) / (n - 1) as f64;
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut at_min, mut at_max) = (PhasePoint::ORIGIN, PhasePoint::ORIGIN);
    for i in 0..n {
        for j in 0..n {
            let pt = PhasePoint::new(q0 + i as f64 * hq, p0 + j as f64 * hp);
            let w = density.evaluate(pt);
            if w < min {
                min = w;
                at_min = pt;
            }
            if w > max {
                max = w;
                at_max = pt;
            }
        }
    }
    let max = polish(density, at_max, max, hq, hp, 1.0);
    let min = -polish(density, at_min, -min, hq, hp, -1.0);
    Extrema { min, max }
}

/// Compass search maximizing `sign · W` from `start`.
fn polish(density: &WignerDensity, start: PhasePoint, mut best: f64, hq: f64, hp: f64, sign: f64) -> f64 {
    let mut at = start;
    let (mut sq, mut sp) = (hq, hp);
    for _ in 0..400 {
        let mut moved = false;
        for (dq, dp) in [(sq, 0.0), (-sq, 0.0), (0.0, sp), (0.0, -sp)] {
            let pt = PhasePoint::new(at.q + dq, at.p + dp);
            let v = sign * density.evaluate(pt);
            if v > best {
                best = v;
                at = pt;
                moved = true;
            }
        }
        if !moved {
            sq *= 0.5;
            sp *= 0.5;
            if sq < 1e-10 * hq && sp < 1e-10 * hp {
                break;
            }
        }
    }
    best
}

/// Checks `W ≥ 0`, `∫W = 1` and `πW ≤ 1`, and reports the purity.
///
/// Normalization uses quadrature; the extrema come from a grid scan. When the
/// density declares its supremum, that value is used for `πW ≤ 1` and the scan
/// only confirms it; otherwise the scan result is a lower estimate of the
/// supremum, not a certificate.
pub fn check_constraints(density: &WignerDensity, cfg: &QuadratureConfig) -> Result<ConstraintReport> {
    let mut notes = Vec::new();
    let bbox = density.integration_domain(cfg.tail_epsilon)?.bounding_box();
    let ext = scan_extrema(density, bbox);

    let sup_pi_w = match density.declared_sup() {
        Some(sup) if ext.max <= sup + NEGATIVE_FLOOR => PI * sup,
        Some(sup) => {
            notes.push(format!(
                "sampled maximum {:.17e} exceeds declared supremum {:.17e}",
                ext.max, sup
            ));
            PI * ext.max
        }
        None => {
            notes.push("sup πW estimated by grid scan; a lower estimate, not a certificate".into());
            PI * ext.max
        }
    };
    let passes_nonneg = ext.min >= -NEGATIVE_FLOOR;
    let passes_pointwise = sup_pi_w <= 1.0 + POINTWISE_SLACK;

    let req = PassRequest {
        powers: vec![2],
        ..PassRequest::default()
    };
    let closed_purity = density.closed_forms().purity.filter(|_| cfg.use_closed_forms);
    let pass = run_pass(density, &req, cfg);
    let (mass, w2, failure) = match pass {
        Ok(r) => (r.mass, r.powers[0], None),
        Err(Partial { error, best }) => {
            let nan = FunctionalEstimate::numeric(f64::NAN, f64::INFINITY);
            match best {
                Some(b) => (b[0], b[1], Some(error)),
                None => (nan, nan, Some(error)),
            }
        }
    };
    let purity = match closed_purity {
        Some(mu) => FunctionalEstimate::exact(mu),
        None => scale(w2, 2.0 * PI),
    };
    let norm_tol = 100.0 * cfg.abs_tol + mass.abs_error;
    let report = ConstraintReport {
        normalization: mass,
        min_value_found: ext.min,
        sup_pi_w,
        passes_nonneg,
        passes_norm: (mass.value - 1.0).abs() <= norm_tol,
        passes_pointwise,
        purity,
        notes,
    };
    if let Some(e) = failure {
        return Err(Error::ConstraintEstimate {
            reason: e.to_string(),
            partial: Box::new(report),
        });
    }
    debug_assert!(
        !report.all_pass() || report.purity.value <= 2.0 + 1e-8,
        "admissible density with purity {}",
        report.purity.value
    );
    Ok(report)
}
