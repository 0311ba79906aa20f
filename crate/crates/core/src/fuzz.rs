//! Seeded randomized checks of the bound inequalities, and the flat-top
//! sharpness table.
//!
//! Random densities are convex mixtures of coherent-state Gaussians, which are
//! nonnegative, normalized and bounded by `1/π` by construction. Trial `i` of
//! a run draws from ChaCha stream `i` of the run's seed, so results do not
//! depend on scheduling.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{assess, entropy_target};
use crate::density::{PhasePoint, WignerDensity};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::states::make_coherent_mixture;
use crate::threshold::limiting_threshold;

/// Settings of a fuzz run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub seed: u64,
    pub trials: usize,
    pub components_max: usize,
    pub center_radius: f64,
    pub n_max: usize,
    pub cfg: QuadratureConfig,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            trials: 100,
            components_max: 6,
            center_radius: 3.0,
            n_max: 32,
            cfg: QuadratureConfig::default(),
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if self.components_max < 1 {
            return Err(Error::Domain("components_max must be at least 1".into()));
        }
        if !(self.center_radius >= 0.0 && self.center_radius.is_finite()) {
            return Err(Error::Domain(format!(
                "center_radius must be finite and >= 0, got {}",
                self.center_radius
            )));
        }
        if self.n_max < 2 {
            return Err(Error::Domain(format!("n_max must be at least 2, got {}", self.n_max)));
        }
        self.cfg.validate()
    }
}

/// Parameters of one randomly drawn mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureDraw {
    pub weights: Vec<f64>,
    pub centers: Vec<PhasePoint>,
}

impl MixtureDraw {
    pub fn build(&self) -> Result<WignerDensity> {
        make_coherent_mixture(&self.weights, &self.centers)
    }
}

/// Independent generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform component count, flat-Dirichlet weights, centers uniform in a disk.
pub fn draw_mixture<R: Rng>(rng: &mut R, components_max: usize, center_radius: f64) -> MixtureDraw {
    let n = rng.random_range(1..=components_max.max(1));
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    let weights: Vec<f64> = if total > 0.0 {
        raw.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / n as f64; n]
    };
    let centers = (0..n)
        .map(|_| {
            let r = center_radius * rng.random::<f64>().sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            PhasePoint::new(r * theta.cos(), r * theta.sin())
        })
        .collect();
    MixtureDraw { weights, centers }
}

pub fn random_coherent_mixture<R: Rng>(rng: &mut R, components_max: usize, center_radius: f64) -> WignerDensity {
    draw_mixture(rng, components_max, center_radius)
        .build()
        .expect("drawn weights lie on the simplex")
}

/// Smallest observed slack of one property; negative beyond `floor` is a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertySlack {
    pub property: String,
    pub slack: f64,
    pub floor: f64,
}

impl PropertySlack {
    fn new(property: &str, slack: f64, floor: f64) -> Self {
        Self {
            property: property.to_string(),
            slack,
            floor,
        }
    }

    pub fn violated(&self) -> bool {
        self.slack.is_nan() || self.slack < self.floor
    }
}

/// Names of the checked properties, in report order.
pub const PROPERTIES: [&str; 8] = [
    "entropy_minus_hierarchy",
    "hierarchy_minus_purity_only",
    "hierarchy_increment",
    "jensen_descent",
    "descent_decrement",
    "variance_identity",
    "first_moment_identity",
    "purity_headroom",
];

/// Slack floor for the inequality chain `S ≥ B_n ≥ purity-only`.
pub const CHAIN_FLOOR: f64 = -1e-8;
/// Floor for the exact identities.
pub const IDENTITY_FLOOR: f64 = -1e-9;
/// Floor for orderings that hold node by node.
pub const ORDER_FLOOR: f64 = -1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub mu: f64,
    pub entropy: f64,
    pub slacks: Vec<PropertySlack>,
}

fn min_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::INFINITY, |m, v| if v.is_nan() { f64::NAN } else { m.min(v) })
}

/// Evaluates every inequality and identity of the hierarchy on one density.
pub fn run_property_suite(density: &WignerDensity, n_max: usize, cfg: &QuadratureConfig) -> Result<SuiteResult> {
    let r = assess(density, n_max, cfg)?;
    let s = r.entropy.value;
    let mu = r.mu.value;
    let t = 1.0 - 0.5 * mu;
    let m = |k: usize| r.descent.get(k);

    let slacks = vec![
        PropertySlack::new(PROPERTIES[0], min_of((1..=n_max).map(|n| s - r.b(n))), CHAIN_FLOOR),
        PropertySlack::new(
            PROPERTIES[1],
            min_of((2..=n_max).map(|n| r.b(n) - r.purity_only_at(n))),
            CHAIN_FLOOR,
        ),
        PropertySlack::new(PROPERTIES[2], min_of((1..n_max).map(|n| r.b(n + 1) - r.b(n))), ORDER_FLOOR),
        PropertySlack::new(
            PROPERTIES[3],
            min_of((2..=n_max).map(|k| m(k) - t.powi(k as i32))),
            IDENTITY_FLOOR,
        ),
        PropertySlack::new(PROPERTIES[4], min_of((1..n_max).map(|k| m(k) - m(k + 1))), ORDER_FLOOR),
        PropertySlack::new(PROPERTIES[5], -r.identity_residual, IDENTITY_FLOOR),
        PropertySlack::new(PROPERTIES[6], -(m(1) - t).abs(), IDENTITY_FLOOR),
        PropertySlack::new(PROPERTIES[7], 2.0 - mu, IDENTITY_FLOOR),
    ];
    Ok(SuiteResult { mu, entropy: s, slacks })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub property: String,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub index: usize,
    pub components: usize,
    pub mu: f64,
    pub entropy: f64,
    pub entropy_minus_target: f64,
}

/// Aggregate of a fuzz run. The serialized form omits wall-clock time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub config: TrialConfig,
    pub trials_run: usize,
    pub violations: Vec<Violation>,
    pub worst_slacks: Vec<PropertySlack>,
    pub trials: Vec<TrialSummary>,
    #[serde(skip)]
    pub elapsed: Duration,
}

enum TrialOutcome {
    Done(TrialSummary, Vec<PropertySlack>),
    Failed(usize, String),
}

/// Runs `config.trials` independent trials and aggregates them in trial order.
pub fn run_fuzz(config: &TrialConfig) -> Result<FuzzReport> {
    config.validate()?;
    let start = Instant::now();
    let outcomes: Vec<TrialOutcome> = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(config.seed, i as u64);
            let draw = draw_mixture(&mut rng, config.components_max, config.center_radius);
            let result = draw
                .build()
                .and_then(|d| run_property_suite(&d, config.n_max, &config.cfg));
            match result {
                Ok(s) => TrialOutcome::Done(
                    TrialSummary {
                        index: i,
                        components: draw.weights.len(),
                        mu: s.mu,
                        entropy: s.entropy,
                        entropy_minus_target: s.entropy - entropy_target(),
                    },
                    s.slacks,
                ),
                Err(e) => TrialOutcome::Failed(i, e.to_string()),
            }
        })
        .collect();

    let mut worst: Vec<PropertySlack> = PROPERTIES
        .iter()
        .zip([
            CHAIN_FLOOR,
            CHAIN_FLOOR,
            ORDER_FLOOR,
            IDENTITY_FLOOR,
            ORDER_FLOOR,
            IDENTITY_FLOOR,
            IDENTITY_FLOOR,
            IDENTITY_FLOOR,
        ])
        .map(|(p, f)| PropertySlack::new(p, f64::INFINITY, f))
        .collect();
    let mut violations = Vec::new();
    let mut trials = Vec::with_capacity(config.trials);
    for outcome in outcomes {
        match outcome {
            TrialOutcome::Done(summary, slacks) => {
                for (w, s) in worst.iter_mut().zip(&slacks) {
                    if s.slack.is_nan() || s.slack < w.slack {
                        w.slack = s.slack;
                    }
                    if s.violated() {
                        violations.push(Violation {
                            trial: summary.index,
                            property: s.property.clone(),
                            slack: s.slack,
                        });
                    }
                }
                trials.push(summary);
            }
            TrialOutcome::Failed(i, message) => violations.push(Violation {
                trial: i,
                property: format!("evaluation_error: {message}"),
                slack: f64::NAN,
            }),
        }
    }
    Ok(FuzzReport {
        config: *config,
        trials_run: config.trials,
        violations,
        worst_slacks: worst,
        trials,
        elapsed: start.elapsed(),
    })
}

/// How the flat-top entropy compares with `1 + ln π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Above,
    Equal,
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub mu: f64,
    pub entropy_flat: f64,
    pub target: f64,
    pub violates_conjectured_bound: bool,
    pub relation: Relation,
    pub status: String,
}

/// Label attached to every flat-top row.
pub const FLAT_TOP_STATUS: &str = "constraint-only, physicality undetermined";

/// Flat-top entropies `ln(2π/μ)` against `1 + ln π`; violation exactly when `μ > 2/e`.
pub fn sharpness_demo(mu_grid: &[f64]) -> Result<Vec<SharpnessRow>> {
    let limit = limiting_threshold();
    mu_grid
        .iter()
        .map(|&mu| {
            if !(mu > 0.0 && mu <= 2.0) {
                return Err(Error::Domain(format!("flat-top purity must lie in (0, 2], got {mu}")));
            }
            let relation = if mu > limit {
                Relation::Below
            } else if mu == limit {
                Relation::Equal
            } else {
                Relation::Above
            };
            Ok(SharpnessRow {
                mu,
                entropy_flat: (2.0 * PI / mu).ln(),
                target: entropy_target(),
                violates_conjectured_bound: mu > limit,
                relation,
                status: FLAT_TOP_STATUS.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_flat_top, make_vacuum};

    #[test]
    fn draws_are_reproducible() {
        let a = draw_mixture(&mut trial_rng(42, 0), 6, 3.0);
        let b = draw_mixture(&mut trial_rng(42, 0), 6, 3.0);
        assert_eq!(a, b);
        let c = draw_mixture(&mut trial_rng(42, 1), 6, 3.0);
        assert_ne!(a, c);
    }

    #[test]
    fn draws_respect_limits() {
        let mut rng = trial_rng(7, 3);
        for _ in 0..200 {
            let d = draw_mixture(&mut rng, 4, 2.0);
            assert!((1..=4).contains(&d.weights.len()));
            assert!((d.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!(d.centers.iter().all(|c| c.radius_squared() <= 4.0 + 1e-12));
            let w = d.build().unwrap();
            let mu = w.closed_forms().purity.unwrap();
            assert!(mu > 0.0 && mu <= 1.0 + 1e-15);
        }
    }

    #[test]
    fn vacuum_suite_slack_is_one_over_n_plus_one() {
        let s = run_property_suite(&make_vacuum(), 10, &QuadratureConfig::default()).unwrap();
        assert!((s.slacks[0].slack - 1.0 / 11.0).abs() < 1e-14);
        assert!(s.slacks.iter().all(|p| !p.violated()));
    }

    #[test]
    fn flat_top_saturates_jensen() {
        let s = run_property_suite(&make_flat_top(1.0).unwrap(), 12, &QuadratureConfig::default()).unwrap();
        assert!(s.slacks[1].slack.abs() < 1e-15);
        assert!(s.slacks[3].slack.abs() < 1e-15);
    }

    #[test]
    fn sharpness_rows() {
        let rows = sharpness_demo(&[0.5, limiting_threshold(), 0.9]).unwrap();
        assert_eq!(rows[0].relation, Relation::Above);
        assert!(rows[0].entropy_flat > rows[0].target);
        assert_eq!(rows[1].relation, Relation::Equal);
        assert!((rows[1].entropy_flat - rows[1].target).abs() < 1e-14);
        assert!(!rows[1].violates_conjectured_bound);
        assert!(rows[2].violates_conjectured_bound);
        assert!(rows[2].entropy_flat < rows[2].target);
        assert!(sharpness_demo(&[0.0]).is_err());
        assert!(sharpness_demo(&[2.5]).is_err());
    }

    #[test]
    fn invalid_trial_config() {
        let c = TrialConfig {
            trials: 0,
            ..TrialConfig::default()
        };
        assert!(run_fuzz(&c).is_err());
    }
}
