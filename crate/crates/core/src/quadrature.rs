//! Deterministic adaptive integration over the phase plane.
//!
//! Every integral is computed on a fixed initial partition of the domain
//! (squares in Cartesian coordinates, annular sectors for disks, intervals
//! for radial profiles). Each cell carries a tensor Gauss-Legendre estimate
//! at two refinement levels; their difference is the cell's error indicator.
//! Cells are split greedily, largest indicator first, until the summed
//! indicator of every component drops below `abs_tol`.
//!
//! Integrands are vector valued so that several functionals of one density
//! can share a single set of nodes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use ordered_float::OrderedFloat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{PhasePoint, WignerDensity};
use crate::error::{Error, Result};

/// Gauss-Legendre points per axis in the per-cell rule.
const RULE_ORDER: usize = 8;

/// Hard cap on the number of leaf cells of one adaptive run.
const MAX_LEAVES: usize = 1 << 18;

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
}

/// A number together with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
}

impl FunctionalEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            abs_error: 0.0,
            method: Method::ClosedForm,
        }
    }

    pub fn numeric(value: f64, abs_error: f64) -> Self {
        Self {
            value,
            abs_error: abs_error.abs(),
            method: Method::Quadrature,
        }
    }
}

/// Tolerances and budgets for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Target for the summed error indicator of every integrated component.
    pub abs_tol: f64,
    /// Maximum number of times a single initial cell may be bisected.
    pub max_depth: u32,
    /// Probability mass allowed outside the truncated domain.
    pub tail_epsilon: f64,
    /// Initial cells per axis.
    pub base_grid: usize,
    /// Use a density's exact functionals instead of integrating when it declares them.
    pub use_closed_forms: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_depth: 30,
            tail_epsilon: 1e-14,
            base_grid: 32,
            use_closed_forms: true,
        }
    }
}

impl QuadratureConfig {
    /// Same settings, but every functional is integrated numerically.
    pub fn numeric_only(self) -> Self {
        Self {
            use_closed_forms: false,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::Domain(format!("abs_tol must be positive, got {}", self.abs_tol)));
        }
        if self.max_depth < 1 {
            return Err(Error::Domain("max_depth must be at least 1".into()));
        }
        if !(self.tail_epsilon > 0.0 && self.tail_epsilon < 1.0) {
            return Err(Error::Domain(format!(
                "tail_epsilon must lie in (0, 1), got {}",
                self.tail_epsilon
            )));
        }
        if self.base_grid < 1 {
            return Err(Error::Domain("base_grid must be at least 1".into()));
        }
        Ok(())
    }
}

/// Region of the phase plane to integrate over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegrationDomain {
    /// Closed disk centred at the origin, integrated in polar coordinates.
    Disk { radius: f64 },
    /// The square `[-r_max, r_max]^2`, standing in for the whole plane.
    TruncatedPlane { r_max: f64 },
    /// An axis-aligned box standing in for the whole plane (for anisotropic densities).
    Rectangle {
        q_min: f64,
        q_max: f64,
        p_min: f64,
        p_max: f64,
    },
}

impl IntegrationDomain {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            IntegrationDomain::Disk { radius } => radius > 0.0 && radius.is_finite(),
            IntegrationDomain::TruncatedPlane { r_max } => r_max > 0.0 && r_max.is_finite(),
            IntegrationDomain::Rectangle {
                q_min,
                q_max,
                p_min,
                p_max,
            } => {
                [q_min, q_max, p_min, p_max].iter().all(|v| v.is_finite())
                    && q_max > q_min
                    && p_max > p_min
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("degenerate integration domain {self:?}")))
        }
    }

    /// Smallest Cartesian box containing the domain, as `(q_min, q_max, p_min, p_max)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match *self {
            IntegrationDomain::Disk { radius } => (-radius, radius, -radius, radius),
            IntegrationDomain::TruncatedPlane { r_max } => (-r_max, r_max, -r_max, r_max),
            IntegrationDomain::Rectangle {
                q_min,
                q_max,
                p_min,
                p_max,
            } => (q_min, q_max, p_min, p_max),
        }
    }
}

struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(RULE_ORDER))
}

/// A cell of an adaptive partition.
trait Cell: Sized + Send + Sync {
    type Point: Copy;
    fn children(&self) -> Vec<Self>;
    fn level(&self) -> u32;
    fn key(&self) -> (u32, u64, u64);
    fn for_each_node(&self, rule: &Rule, visit: &mut dyn FnMut(Self::Point, f64));
}

#[derive(Clone, Copy)]
struct Interval {
    a: f64,
    b: f64,
    level: u32,
    index: u64,
}

impl Cell for Interval {
    type Point = f64;

    fn children(&self) -> Vec<Self> {
        let m = 0.5 * (self.a + self.b);
        vec![
            Interval {
                a: self.a,
                b: m,
                level: self.level + 1,
                index: 2 * self.index,
            },
            Interval {
                a: m,
                b: self.b,
                level: self.level + 1,
                index: 2 * self.index + 1,
            },
        ]
    }

    fn level(&self) -> u32 {
        self.level
    }

    fn key(&self) -> (u32, u64, u64) {
        (self.level, self.index, 0)
    }

    fn for_each_node(&self, rule: &Rule, visit: &mut dyn FnMut(f64, f64)) {
        let half = 0.5 * (self.b - self.a);
        let mid = 0.5 * (self.a + self.b);
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            visit(mid + half * x, half * w);
        }
    }
}

#[derive(Clone, Copy)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    polar: bool,
    level: u32,
    ix: u64,
    iy: u64,
}

impl Cell for Rect {
    type Point = PhasePoint;

    fn children(&self) -> Vec<Self> {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        let mut out = Vec::with_capacity(4);
        for (dx, (x0, x1)) in [(self.x0, xm), (xm, self.x1)].into_iter().enumerate() {
            for (dy, (y0, y1)) in [(self.y0, ym), (ym, self.y1)].into_iter().enumerate() {
                out.push(Rect {
                    x0,
                    x1,
                    y0,
                    y1,
                    polar: self.polar,
                    level: self.level + 1,
                    ix: 2 * self.ix + dx as u64,
                    iy: 2 * self.iy + dy as u64,
                });
            }
        }
        out
    }

    fn level(&self) -> u32 {
        self.level
    }

    fn key(&self) -> (u32, u64, u64) {
        (self.level, self.ix, self.iy)
    }

    fn for_each_node(&self, rule: &Rule, visit: &mut dyn FnMut(PhasePoint, f64)) {
        let hx = 0.5 * (self.x1 - self.x0);
        let mx = 0.5 * (self.x0 + self.x1);
        let hy = 0.5 * (self.y1 - self.y0);
        let my = 0.5 * (self.y0 + self.y1);
        for (u, wu) in rule.nodes.iter().zip(&rule.weights) {
            let x = mx + hx * u;
            for (v, wv) in rule.nodes.iter().zip(&rule.weights) {
                let y = my + hy * v;
                let w = hx * hy * wu * wv;
                if self.polar {
                    let (s, c) = y.sin_cos();
                    visit(PhasePoint::new(x * c, x * s), w * x);
                } else {
                    visit(PhasePoint::new(x, y), w);
                }
            }
        }
    }
}

struct Leaf<C> {
    cell: C,
    value: Vec<f64>,
    error: Vec<f64>,
    child_values: Vec<Vec<f64>>,
    indicator: f64,
}

fn apply_rule<C: Cell>(
    cell: &C,
    dim: usize,
    f: &(dyn Fn(C::Point, &mut [f64]) + Sync),
) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    let mut scratch = vec![0.0; dim];
    cell.for_each_node(rule(), &mut |pt, w| {
        scratch.iter_mut().for_each(|s| *s = 0.0);
        f(pt, &mut scratch);
        for (a, s) in acc.iter_mut().zip(&scratch) {
            *a += w * s;
        }
    });
    acc
}

fn make_leaf<C: Cell>(
    cell: C,
    parent: Option<Vec<f64>>,
    dim: usize,
    f: &(dyn Fn(C::Point, &mut [f64]) + Sync),
) -> Leaf<C> {
    let parent = parent.unwrap_or_else(|| apply_rule(&cell, dim, f));
    let child_values: Vec<Vec<f64>> = cell.children().iter().map(|c| apply_rule(c, dim, f)).collect();
    let mut value = vec![0.0; dim];
    for cv in &child_values {
        for (v, x) in value.iter_mut().zip(cv) {
            *v += x;
        }
    }
    let error: Vec<f64> = value.iter().zip(&parent).map(|(v, p)| (v - p).abs()).collect();
    let indicator = error.iter().fold(0.0_f64, |m, &e| if e.is_nan() { f64::NAN } else { m.max(e) });
    Leaf {
        cell,
        value,
        error,
        child_values,
        indicator,
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut c = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

enum Failure {
    NonFinite,
    NotConverged(Vec<FunctionalEstimate>),
}

/// Largest indicator first; ties broken by cell key so refinement order is deterministic.
type HeapEntry = (OrderedFloat<f64>, Reverse<(u32, u64, u64)>, usize);

fn run_adaptive<C: Cell>(
    initial: Vec<C>,
    dim: usize,
    f: &(dyn Fn(C::Point, &mut [f64]) + Sync),
    cfg: &QuadratureConfig,
) -> std::result::Result<Vec<FunctionalEstimate>, Failure> {
    let mut leaves: Vec<Leaf<C>> = initial
        .into_par_iter()
        .map(|c| make_leaf(c, None, dim, f))
        .collect();
    if leaves.iter().any(|l| !l.indicator.is_finite() || l.value.iter().any(|v| !v.is_finite())) {
        return Err(Failure::NonFinite);
    }

    let mut heap: BinaryHeap<HeapEntry> = leaves
        .iter()
        .enumerate()
        .map(|(i, l)| (OrderedFloat(l.indicator), Reverse(l.cell.key()), i))
        .collect();
    let mut total_error = vec![0.0; dim];
    for l in &leaves {
        for (t, e) in total_error.iter_mut().zip(&l.error) {
            *t += e;
        }
    }

    let worst = |t: &[f64]| t.iter().fold(0.0_f64, |m, &e| m.max(e));
    let mut converged = true;
    while worst(&total_error) > cfg.abs_tol {
        let Some((_, _, slot)) = heap.pop() else {
            converged = false;
            break;
        };
        if leaves[slot].cell.level() >= cfg.max_depth {
            // Frozen: stays a leaf, never split again.
            continue;
        }
        if leaves.len() + 4 > MAX_LEAVES {
            converged = false;
            break;
        }
        let old = &mut leaves[slot];
        let parents = std::mem::take(&mut old.child_values);
        let cells = old.cell.children();
        let new_leaves: Vec<Leaf<C>> = cells
            .into_par_iter()
            .zip(parents.into_par_iter())
            .map(|(c, pv)| make_leaf(c, Some(pv), dim, f))
            .collect();
        if new_leaves
            .iter()
            .any(|l| !l.indicator.is_finite() || l.value.iter().any(|v| !v.is_finite()))
        {
            return Err(Failure::NonFinite);
        }
        for (t, e) in total_error.iter_mut().zip(&leaves[slot].error) {
            *t -= e;
        }
        for (k, leaf) in new_leaves.into_iter().enumerate() {
            for (t, e) in total_error.iter_mut().zip(&leaf.error) {
                *t += e;
            }
            let target = if k == 0 {
                slot
            } else {
                leaves.push(leaf);
                let i = leaves.len() - 1;
                heap.push((OrderedFloat(leaves[i].indicator), Reverse(leaves[i].cell.key()), i));
                continue;
            };
            leaves[target] = leaf;
            heap.push((
                OrderedFloat(leaves[target].indicator),
                Reverse(leaves[target].cell.key()),
                target,
            ));
        }
    }

    let estimates: Vec<FunctionalEstimate> = (0..dim)
        .map(|c| {
            let value = compensated_sum(leaves.iter().map(|l| l.value[c]));
            let err: f64 = leaves.iter().map(|l| l.error[c]).sum();
            FunctionalEstimate::numeric(value, err)
        })
        .collect();
    if converged {
        Ok(estimates)
    } else {
        Err(Failure::NotConverged(estimates))
    }
}

/// Failure of a pass, with the best available estimates when the tolerance was not met.
pub(crate) struct Partial {
    pub error: Error,
    pub best: Option<Vec<FunctionalEstimate>>,
}

impl From<Error> for Partial {
    fn from(error: Error) -> Self {
        Partial { error, best: None }
    }
}

fn into_result(
    what: &str,
    outcome: std::result::Result<Vec<FunctionalEstimate>, Failure>,
) -> std::result::Result<Vec<FunctionalEstimate>, Partial> {
    match outcome {
        Ok(v) => Ok(v),
        Err(Failure::NonFinite) => Err(Partial {
            error: Error::InvalidInput(format!("integrand for {what} produced non-finite values")),
            best: None,
        }),
        Err(Failure::NotConverged(best)) => {
            let (value, abs_error) = best
                .iter()
                .max_by(|a, b| a.abs_error.total_cmp(&b.abs_error))
                .map(|e| (e.value, e.abs_error))
                .unwrap_or((f64::NAN, f64::NAN));
            Err(Partial {
                error: Error::NonConvergence {
                    what: what.to_string(),
                    value,
                    abs_error,
                },
                best: Some(best),
            })
        }
    }
}

fn initial_rects(domain: &IntegrationDomain, n: usize) -> Vec<Rect> {
    let (x0, x1, y0, y1, polar) = match *domain {
        IntegrationDomain::Disk { radius } => (0.0, radius, 0.0, 2.0 * PI, true),
        _ => {
            let (a, b, c, d) = domain.bounding_box();
            (a, b, c, d, false)
        }
    };
    let hx = (x1 - x0) / n as f64;
    let hy = (y1 - y0) / n as f64;
    let mut cells = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            cells.push(Rect {
                x0: x0 + i as f64 * hx,
                x1: if i + 1 == n { x1 } else { x0 + (i + 1) as f64 * hx },
                y0: y0 + j as f64 * hy,
                y1: if j + 1 == n { y1 } else { y0 + (j + 1) as f64 * hy },
                polar,
                level: 0,
                ix: i as u64,
                iy: j as u64,
            });
        }
    }
    cells
}

/// Integrates `dim` components at once over a two-dimensional domain.
///
/// `integrand` receives a zeroed slice of length `dim` to fill in.
pub fn integrate_many<F>(
    dim: usize,
    integrand: F,
    domain: &IntegrationDomain,
    cfg: &QuadratureConfig,
) -> Result<Vec<FunctionalEstimate>>
where
    F: Fn(PhasePoint, &mut [f64]) + Sync,
{
    plane_pass(dim, &integrand, domain, cfg).map_err(|p| p.error)
}

pub(crate) fn plane_pass(
    dim: usize,
    integrand: &(dyn Fn(PhasePoint, &mut [f64]) + Sync),
    domain: &IntegrationDomain,
    cfg: &QuadratureConfig,
) -> std::result::Result<Vec<FunctionalEstimate>, Partial> {
    cfg.validate()?;
    domain.validate()?;
    let cells = initial_rects(domain, cfg.base_grid);
    into_result("2d integral", run_adaptive(cells, dim, integrand, cfg))
}

/// Integrates a scalar function over a two-dimensional domain.
pub fn integrate<F>(integrand: F, domain: &IntegrationDomain, cfg: &QuadratureConfig) -> Result<FunctionalEstimate>
where
    F: Fn(PhasePoint) -> f64 + Sync,
{
    let v = integrate_many(1, |pt, out| out[0] = integrand(pt), domain, cfg)?;
    Ok(v[0])
}

/// Computes `2π ∫_0^{r_max} profile(r) r dr` for each of `dim` components.
pub fn integrate_radial_many<F>(
    dim: usize,
    profile: F,
    r_max: f64,
    cfg: &QuadratureConfig,
) -> Result<Vec<FunctionalEstimate>>
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    radial_pass(dim, &profile, r_max, cfg).map_err(|p| p.error)
}

pub(crate) fn radial_pass(
    dim: usize,
    profile: &(dyn Fn(f64, &mut [f64]) + Sync),
    r_max: f64,
    cfg: &QuadratureConfig,
) -> std::result::Result<Vec<FunctionalEstimate>, Partial> {
    cfg.validate()?;
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::Domain(format!("radial cutoff must be positive, got {r_max}")).into());
    }
    let n = cfg.base_grid;
    let h = r_max / n as f64;
    let cells: Vec<Interval> = (0..n)
        .map(|i| Interval {
            a: i as f64 * h,
            b: if i + 1 == n { r_max } else { (i + 1) as f64 * h },
            level: 0,
            index: i as u64,
        })
        .collect();
    let weighted = |r: f64, out: &mut [f64]| {
        profile(r, out);
        let jac = 2.0 * PI * r;
        out.iter_mut().for_each(|v| *v *= jac);
    };
    into_result("radial integral", run_adaptive(cells, dim, &weighted, cfg))
}

/// Computes `2π ∫_0^{r_max} profile(r) r dr`.
pub fn integrate_radial<F>(profile: F, r_max: f64, cfg: &QuadratureConfig) -> Result<FunctionalEstimate>
where
    F: Fn(f64) -> f64 + Sync,
{
    let v = integrate_radial_many(1, |r, out| out[0] = profile(r), r_max, cfg)?;
    Ok(v[0])
}

/// Radius outside of which the density carries less than `eps` of its mass.
///
/// For disk-supported densities this is the support radius itself.
pub fn tail_radius(density: &WignerDensity, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("tail mass must lie in (0, 1), got {eps}")));
    }
    density.tail_radius(eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(RULE_ORDER);
        let total: f64 = r.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // x^14 on [-1, 1] integrates to 2/15
        let m: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn constant_over_unit_disk_is_one() {
        let cfg = QuadratureConfig::default();
        let est = integrate(|_| 1.0 / PI, &IntegrationDomain::Disk { radius: 1.0 }, &cfg).unwrap();
        assert!((est.value - 1.0).abs() < 1e-14, "{}", est.value);
        assert!(est.abs_error <= cfg.abs_tol);
    }

    #[test]
    fn gaussian_normalization_on_truncated_plane() {
        let cfg = QuadratureConfig::default();
        let r = (1e14_f64).ln().sqrt();
        let est = integrate(
            |pt| (-(pt.q * pt.q + pt.p * pt.p)).exp() / PI,
            &IntegrationDomain::TruncatedPlane { r_max: r },
            &cfg,
        )
        .unwrap();
        assert!((est.value - 1.0).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn vacuum_first_descent_moment_is_half() {
        let cfg = QuadratureConfig::default();
        let est = integrate(
            |pt| {
                let w = (-(pt.q * pt.q + pt.p * pt.p)).exp() / PI;
                w * (1.0 - PI * w)
            },
            &IntegrationDomain::TruncatedPlane { r_max: 6.0 },
            &cfg,
        )
        .unwrap();
        assert!((est.value - 0.5).abs() < 1e-10, "{}", est.value);
    }

    #[test]
    fn radial_profiles() {
        let cfg = QuadratureConfig::default();
        let g = |r: f64| (-r * r).exp() / PI;
        let one = integrate_radial(g, 6.0, &cfg).unwrap();
        assert!((one.value - 1.0).abs() < 1e-10);
        let half = integrate_radial(|r| g(r) * g(r), 6.0, &cfg).unwrap();
        assert!((2.0 * PI * half.value - 1.0).abs() < 1e-10);
        let mu: f64 = 0.7;
        let flat = integrate_radial(|_| mu / (2.0 * PI), (2.0 / mu).sqrt(), &cfg).unwrap();
        assert!((flat.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn radial_and_planar_paths_agree() {
        let cfg = QuadratureConfig::default();
        let g = |r2: f64| r2 * (-r2).exp() / PI;
        let radial = integrate_radial(|r| g(r * r), 6.5, &cfg).unwrap();
        let planar = integrate(
            |pt| g(pt.q * pt.q + pt.p * pt.p),
            &IntegrationDomain::TruncatedPlane { r_max: 6.5 },
            &cfg,
        )
        .unwrap();
        assert!((radial.value - planar.value).abs() <= 2.0 * cfg.abs_tol);
    }

    #[test]
    fn repeated_runs_are_bit_identical() {
        let cfg = QuadratureConfig::default();
        let f = |pt: PhasePoint| (-(pt.q - 0.3).powi(2) - 2.0 * pt.p * pt.p).exp() * (1.0 + pt.q.sin());
        let d = IntegrationDomain::Rectangle {
            q_min: -6.0,
            q_max: 7.0,
            p_min: -5.0,
            p_max: 5.0,
        };
        let a = integrate(f, &d, &cfg).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| integrate(f, &d, &cfg).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.abs_error.to_bits(), b.abs_error.to_bits());
    }

    #[test]
    fn adaptive_refinement_resolves_a_kink() {
        let cfg = QuadratureConfig {
            base_grid: 4,
            abs_tol: 1e-7,
            ..QuadratureConfig::default()
        };
        // kink placed off the initial grid lines
        let est = integrate(
            |pt| (pt.q - 0.123).abs(),
            &IntegrationDomain::TruncatedPlane { r_max: 1.0 },
            &cfg,
        )
        .unwrap();
        let exact = 2.0 * (1.123_f64.powi(2) / 2.0 + 0.877_f64.powi(2) / 2.0);
        assert!((est.value - exact).abs() < 1e-7, "{} vs {exact}", est.value);
    }

    #[test]
    fn nonconvergence_is_reported_with_best_estimate() {
        let cfg = QuadratureConfig {
            max_depth: 1,
            base_grid: 2,
            ..QuadratureConfig::default()
        };
        let err = integrate(
            |pt| if pt.q > 0.1234567 { 1.0 } else { 0.0 },
            &IntegrationDomain::TruncatedPlane { r_max: 1.0 },
            &cfg,
        )
        .unwrap_err();
        match err {
            Error::NonConvergence { value, .. } => assert!((value - 2.0 * 0.8765433).abs() < 0.2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_rejected() {
        let cfg = QuadratureConfig::default();
        let err = integrate(|_| f64::NAN, &IntegrationDomain::Disk { radius: 1.0 }, &cfg).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn invalid_config_and_domain() {
        let bad = QuadratureConfig {
            abs_tol: 0.0,
            ..QuadratureConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(IntegrationDomain::Disk { radius: -1.0 }.validate().is_err());
    }
}
