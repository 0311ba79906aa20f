//! Flat-top densities: entropy ln(2 pi / mu) crosses 1 + ln(pi) exactly at mu = 2/e.

use wigner_bounds::fuzz::{sharpness_demo, FLAT_TOP_STATUS};
use wigner_bounds::limiting_threshold;

fn main() -> wigner_bounds::Result<()> {
    let grid = [0.4, 0.6, limiting_threshold(), 0.8, 1.0, 1.5, 2.0];
    println!("flat-top rows are {FLAT_TOP_STATUS}");
    for row in sharpness_demo(&grid)? {
        println!(
            "mu = {:.6}  S = {:.9}  S - target = {:+.3e}  {:?}",
            row.mu,
            row.entropy_flat,
            row.entropy_flat - row.target,
            row.relation
        );
    }
    Ok(())
}
