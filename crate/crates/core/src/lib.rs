//! Lower bounds on the Wigner entropy `S[W] = -∫ W ln W` of phase-space densities.
//!
//! The hierarchy `B_n = ln π + Σ_{k≤n} m_k / k`, with descent moments
//! `m_k = ∫ W (1 - πW)^k`, increases monotonically to the entropy for any
//! density that is nonnegative, normalized, and bounded by `1/π`. Comparing
//! `B_n` with the vacuum value `1 + ln π` yields purity thresholds `μ_n`
//! above which the conjectured bound `S ≥ 1 + ln π` is guaranteed.
//!
//! Modules:
//! - [`density`] and [`quadrature`]: the density abstraction and adaptive integration.
//! - [`functionals`]: entropy, purity, moments, and constraint checks.
//! - [`states`]: analytic families and the JSON state record.
//! - [`bounds`]: the hierarchy and its verdicts.
//! - [`threshold`]: purity thresholds.
//! - [`fuzz`]: randomized property checks and the flat-top sharpness sweep.
//! - [`report`]: CLI commands and their JSON/CSV output.

pub mod bounds;
pub mod density;
pub mod error;
pub mod functionals;
pub mod fuzz;
pub mod quadrature;
pub mod report;
pub mod states;
pub mod threshold;

pub use bounds::{assess, bound_b1, bound_bn, entropy_target, purity_only_bound, variance_refined_b2, BoundReport, Verdict};
pub use density::{PhasePoint, Support, WignerDensity};
pub use error::{Error, Result};
pub use functionals::{
    check_constraints, descent_moments, entropy, power_moment, purity, variance_of_x, ConstraintReport, DescentMoments,
};
pub use fuzz::{run_fuzz, sharpness_demo, FuzzReport, TrialConfig};
pub use quadrature::{FunctionalEstimate, IntegrationDomain, Method, QuadratureConfig};
pub use states::{
    make_coherent_mixture, make_flat_top, make_fock01_mixture, make_squeezed_vacuum, make_thermal, make_vacuum,
    parse_state_spec, StateSpec,
};
pub use threshold::{limiting_threshold, mu_threshold, solve_t_n, threshold_table, variance_threshold, ThresholdEntry};
