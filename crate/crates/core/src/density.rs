//! Phase-space densities and the metadata the integrators rely on.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::IntegrationDomain;

/// A point `(q, p)` of single-mode phase space, in units where the vacuum is
/// `exp(-(q² + p²)) / π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { q: 0.0, p: 0.0 };

    pub fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }

    pub fn radius_squared(&self) -> f64 {
        self.q * self.q + self.p * self.p
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite()
    }

    /// Rigid rotation about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.q - s * self.p, s * self.q + c * self.p)
    }
}

impl From<(f64, f64)> for PhasePoint {
    fn from((q, p): (f64, f64)) -> Self {
        Self { q, p }
    }
}

type Evaluator = Arc<dyn Fn(PhasePoint) -> f64 + Send + Sync>;
type TailFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type BoxFn = Arc<dyn Fn(f64) -> IntegrationDomain + Send + Sync>;
type MomentFn = Arc<dyn Fn(u32) -> f64 + Send + Sync>;

/// Where the density can be nonzero.
#[derive(Clone)]
pub enum Support {
    /// Whole plane; mass beyond `tail_radius(eps)` is below `eps`.
    ///
    /// `tail_box`, when present, returns a (possibly anisotropic) box with the
    /// same guarantee and is preferred for integration.
    WholePlane {
        tail_radius: Option<TailFn>,
        tail_box: Option<BoxFn>,
    },
    /// Closed disk of the given radius centred at the origin.
    Disk { radius: f64 },
}

impl fmt::Debug for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Support::WholePlane {
                tail_radius,
                tail_box,
            } => f
                .debug_struct("WholePlane")
                .field("tail_radius", &tail_radius.is_some())
                .field("tail_box", &tail_box.is_some())
                .finish(),
            Support::Disk { radius } => f.debug_struct("Disk").field("radius", radius).finish(),
        }
    }
}

/// Exact values of functionals, for states where they are known.
#[derive(Clone, Default)]
pub struct ClosedForms {
    pub entropy: Option<f64>,
    pub purity: Option<f64>,
    /// `k ↦ ∫ W^k`
    pub power_moment: Option<MomentFn>,
    /// `k ↦ E[(1 - πW)^k]`
    pub descent_moment: Option<MomentFn>,
    /// `Var(πW)` under `W`
    pub variance_x: Option<f64>,
}

impl ClosedForms {
    /// True when purity, power moments, descent moments and `Var(X)` are all known,
    /// so that a consistent set of moments can be drawn from closed forms alone.
    pub fn has_moment_set(&self) -> bool {
        self.purity.is_some()
            && self.power_moment.is_some()
            && self.descent_moment.is_some()
            && self.variance_x.is_some()
    }
}

impl fmt::Debug for ClosedForms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedForms")
            .field("entropy", &self.entropy)
            .field("purity", &self.purity)
            .field("power_moment", &self.power_moment.is_some())
            .field("descent_moment", &self.descent_moment.is_some())
            .field("variance_x", &self.variance_x)
            .finish()
    }
}

/// An evaluable phase-space density `W(q, p)` with analytic metadata.
///
/// Cheap to clone; all parts are shared and immutable.
#[derive(Clone)]
pub struct WignerDensity {
    label: String,
    evaluator: Evaluator,
    radial: bool,
    support: Support,
    declared_sup: Option<f64>,
    closed_forms: ClosedForms,
}

impl fmt::Debug for WignerDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WignerDensity")
            .field("label", &self.label)
            .field("radial", &self.radial)
            .field("support", &self.support)
            .field("declared_sup", &self.declared_sup)
            .field("closed_forms", &self.closed_forms)
            .finish()
    }
}

impl WignerDensity {
    /// Starts a whole-plane density with no metadata beyond its values.
    pub fn builder<F>(label: impl Into<String>, evaluator: F) -> DensityBuilder
    where
        F: Fn(PhasePoint) -> f64 + Send + Sync + 'static,
    {
        DensityBuilder {
            density: WignerDensity {
                label: label.into(),
                evaluator: Arc::new(evaluator),
                radial: false,
                support: Support::WholePlane {
                    tail_radius: None,
                    tail_box: None,
                },
                declared_sup: None,
                closed_forms: ClosedForms::default(),
            },
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `W(q, p)`.
    #[inline]
    pub fn evaluate(&self, point: PhasePoint) -> f64 {
        (self.evaluator)(point)
    }

    pub fn is_radial(&self) -> bool {
        self.radial
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn declared_sup(&self) -> Option<f64> {
        self.declared_sup
    }

    pub fn closed_forms(&self) -> &ClosedForms {
        &self.closed_forms
    }

    pub fn tail_radius(&self, eps: f64) -> Result<f64> {
        match &self.support {
            Support::Disk { radius } => Ok(*radius),
            Support::WholePlane {
                tail_radius: Some(f),
                ..
            } => Ok(f(eps)),
            Support::WholePlane { tail_box: Some(b), .. } => {
                let (a, b, c, d) = b(eps).bounding_box();
                Ok([a, b, c, d].iter().fold(0.0_f64, |m, v| m.max(v.abs())) * std::f64::consts::SQRT_2)
            }
            Support::WholePlane { .. } => Err(Error::MissingMetadata(format!(
                "density '{}' declares no tail radius",
                self.label
            ))),
        }
    }

    /// Domain that holds all but `eps` of the mass.
    pub fn integration_domain(&self, eps: f64) -> Result<IntegrationDomain> {
        match &self.support {
            Support::Disk { radius } => Ok(IntegrationDomain::Disk { radius: *radius }),
            Support::WholePlane { tail_box: Some(b), .. } => Ok(b(eps)),
            Support::WholePlane { .. } => Ok(IntegrationDomain::TruncatedPlane {
                r_max: self.tail_radius(eps)?,
            }),
        }
    }

    /// Radial cutoff for the one-dimensional fast path.
    pub(crate) fn radial_cutoff(&self, eps: f64) -> Result<f64> {
        self.tail_radius(eps)
    }
}

/// Builder for user-defined densities.
pub struct DensityBuilder {
    density: WignerDensity,
}

impl DensityBuilder {
    /// Declares that `W` depends on `q² + p²` only, enabling the radial fast path.
    pub fn radial(mut self) -> Self {
        self.density.radial = true;
        self
    }

    pub fn disk_support(mut self, radius: f64) -> Self {
        self.density.support = Support::Disk { radius };
        self
    }

    pub fn tail_radius<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let tail_box = match &self.density.support {
            Support::WholePlane { tail_box, .. } => tail_box.clone(),
            Support::Disk { .. } => None,
        };
        self.density.support = Support::WholePlane {
            tail_radius: Some(Arc::new(f)),
            tail_box,
        };
        self
    }

    pub fn tail_box<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> IntegrationDomain + Send + Sync + 'static,
    {
        let tail_radius = match &self.density.support {
            Support::WholePlane { tail_radius, .. } => tail_radius.clone(),
            Support::Disk { .. } => None,
        };
        self.density.support = Support::WholePlane {
            tail_radius,
            tail_box: Some(Arc::new(f)),
        };
        self
    }

    pub fn declared_sup(mut self, sup: f64) -> Self {
        self.density.declared_sup = Some(sup);
        self
    }

    pub fn entropy(mut self, s: f64) -> Self {
        self.density.closed_forms.entropy = Some(s);
        self
    }

    pub fn purity(mut self, mu: f64) -> Self {
        self.density.closed_forms.purity = Some(mu);
        self
    }

    pub fn power_moments<F>(mut self, f: F) -> Self
    where
        F: Fn(u32) -> f64 + Send + Sync + 'static,
    {
        self.density.closed_forms.power_moment = Some(Arc::new(f));
        self
    }

    pub fn descent_moments<F>(mut self, f: F) -> Self
    where
        F: Fn(u32) -> f64 + Send + Sync + 'static,
    {
        self.density.closed_forms.descent_moment = Some(Arc::new(f));
        self
    }

    pub fn variance_x(mut self, v: f64) -> Self {
        self.density.closed_forms.variance_x = Some(v);
        self
    }

    pub fn build(self) -> WignerDensity {
        self.density
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_radius_requires_metadata() {
        let d = WignerDensity::builder("bare", |_| 0.0).build();
        assert!(matches!(d.tail_radius(1e-10), Err(Error::MissingMetadata(_))));
        let d = WignerDensity::builder("disk", |_| 0.0).disk_support(2.0).build();
        assert_eq!(d.tail_radius(1e-10).unwrap(), 2.0);
        assert_eq!(
            d.integration_domain(1e-10).unwrap(),
            IntegrationDomain::Disk { radius: 2.0 }
        );
    }

    #[test]
    fn rotation_preserves_radius() {
        let p = PhasePoint::new(1.5, -0.25);
        let r = p.rotated(0.731);
        assert!((p.radius_squared() - r.radius_squared()).abs() < 1e-14);
    }
}
