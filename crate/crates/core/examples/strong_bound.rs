// Finite-alpha strong recovery bounds for a few (alpha, p) pairs.

use lp_recovery::bounds::{strong_bound, ExponentSearchConfig};

pub fn run_example() -> lp_recovery::Result<()> {
    let cfg = ExponentSearchConfig::default();
    for &(alpha, p) in &[(0.99, 1.0), (0.8, 1.0), (0.99, 0.5)] {
        let start = std::time::Instant::now();
        let b = strong_bound(alpha, p, &cfg)?;
        println!(
            "alpha={alpha} p={p}: rho >= {:.5} (lambda_min {:.4}, lambda_max {:.4}, gamma {:.3e}) in {:.1?}",
            b.rho_bound, b.lambda_min, b.lambda_max, b.winning_gamma, start.elapsed()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
