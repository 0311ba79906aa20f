//! B_2 equals the purity-only second-order bound plus Var(X)/2.

use wigner_bounds::states::*;
use wigner_bounds::{assess, PhasePoint, QuadratureConfig};

fn main() -> wigner_bounds::Result<()> {
    let cfg = QuadratureConfig::default();
    let states = vec![
        make_vacuum(),
        make_thermal(0.5)?,
        make_fock01_mixture(0.5)?,
        make_coherent_mixture(&[0.5, 0.5], &[PhasePoint::new(-1.5, 0.0), PhasePoint::new(1.5, 0.0)])?,
        make_flat_top(0.7)?,
    ];
    for d in &states {
        let r = assess(d, 2, &cfg)?;
        println!(
            "{:<28} mu = {:.4}  Var(X) = {:.6}  B_2 = {:.9}  refined = {:.9}  purity-only = {:.9}  {}",
            d.label(),
            r.mu.value,
            r.var_x.value,
            r.b(2),
            r.b2_variance_refined,
            r.purity_only_at(2),
            r.verdicts.variance_refined.as_str()
        );
    }
    Ok(())
}
