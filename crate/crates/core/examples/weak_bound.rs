// Finite-alpha weak recovery bound: one support, one sign pattern.

use lp_recovery::bounds::{weak_bound, ExponentSearchConfig};

pub fn run_example() -> lp_recovery::Result<()> {
    let cfg = ExponentSearchConfig::default();
    let start = std::time::Instant::now();
    let b = weak_bound(0.99, 0.5, &cfg)?;
    println!(
        "alpha=0.99 p=0.5: weak rho >= {:.5} (lambda_tilde_max {:.4}, lambda_min {:.4} at alpha' {:.4}) in {:.1?}",
        b.rho_bound,
        b.lambda_tilde_max.unwrap_or(f64::NAN),
        b.lambda_min,
        b.effective_alpha.unwrap_or(f64::NAN),
        start.elapsed()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
