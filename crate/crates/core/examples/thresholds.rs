//! Purity thresholds below which the vacuum entropy bound is guaranteed.

use wigner_bounds::threshold::{limiting_threshold, threshold_table, DEFAULT_TOL};
use wigner_bounds::variance_threshold;

fn main() -> wigner_bounds::Result<()> {
    println!("{:>4}  {:>18}  {:>18}", "n", "t_n", "mu_n");
    for row in threshold_table(12, DEFAULT_TOL)? {
        println!("{:>4}  {:>18.15}  {:>18.15}", row.n, row.t_n, row.mu_n);
    }
    println!("{:>4}  {:>18}  {:>18.15}", "inf", "", limiting_threshold());

    println!("\nwith a variance floor v0 on X = pi W, the second-order threshold moves up:");
    for v0 in [0.0, 0.05, 0.1, 0.2] {
        println!("  v0 = {v0:<5} mu <= {:.6}", variance_threshold(v0)?);
    }
    Ok(())
}
