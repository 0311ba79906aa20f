//! The hierarchy B_n on the vacuum, from quadrature, against ln(pi) + n/(n+1).

use std::f64::consts::PI;

use wigner_bounds::{assess, make_vacuum, QuadratureConfig};

fn main() -> wigner_bounds::Result<()> {
    let cfg = QuadratureConfig::default().numeric_only();
    let report = assess(&make_vacuum(), 12, &cfg)?;
    println!("S = {:.12} (target {:.12})", report.entropy.value, report.target);
    println!("mu = {:.12}, Var(X) = {:.12}", report.mu.value, report.var_x.value);
    for n in 1..=report.n_max {
        let exact = PI.ln() + n as f64 / (n as f64 + 1.0);
        println!(
            "B_{n:<2} = {:.12}  exact {:.12}  {}",
            report.b(n),
            exact,
            report.verdicts.hierarchy[n - 1].as_str()
        );
    }
    Ok(())
}
