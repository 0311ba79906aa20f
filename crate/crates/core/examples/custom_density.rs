//! A user-supplied density: constraint checks and bounds without closed forms.

use std::f64::consts::PI;

use wigner_bounds::{assess, check_constraints, QuadratureConfig, WignerDensity};

fn main() -> wigner_bounds::Result<()> {
    // Anisotropic Gaussian with variances a/2 and 1/(2a), rotated by 0.4 rad.
    let a: f64 = 2.5;
    let (c, s) = (0.4f64.cos(), 0.4f64.sin());
    let density = WignerDensity::builder("rotated squeeze", move |pt| {
        let u = c * pt.q + s * pt.p;
        let v = -s * pt.q + c * pt.p;
        (-(u * u / a + v * v * a)).exp() / PI
    })
    .tail_radius(move |eps: f64| (a.max(1.0 / a) * (1.0 / eps).ln()).sqrt())
    .declared_sup(1.0 / PI)
    .build();

    let cfg = QuadratureConfig::default();
    let constraints = check_constraints(&density, &cfg)?;
    println!(
        "normalization {:.12}, min {:.3e}, sup(pi W) {:.6}, all pass: {}",
        constraints.normalization.value,
        constraints.min_value_found,
        constraints.sup_pi_w,
        constraints.all_pass()
    );
    let r = assess(&density, 16, &cfg)?;
    println!("mu = {:.10}, S = {:.10} +- {:.1e}", r.mu.value, r.entropy.value, r.entropy.abs_error);
    println!("B_16 = {:.10}, first guaranteed order: {:?}", r.b(16), r.verdicts.first_guaranteed_order);
    Ok(())
}
