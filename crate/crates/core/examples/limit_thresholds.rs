// Limiting thresholds as m/n -> 1: the strong threshold rho*(p) with its
// derivative, and the constant weak and sectional thresholds.

use lp_recovery::limits::{sectional_limit_threshold, strong_limit_threshold, weak_limit_threshold};
use lp_recovery::QuadratureConfig;

pub fn run_example() -> lp_recovery::Result<()> {
    let quad = QuadratureConfig::default();
    println!("{:>5} {:>10} {:>10} {:>12} {:>6} {:>10}", "p", "z*", "rho*", "d rho*/dp", "weak", "sectional");
    for p in [0.01, 0.1, 0.25, 0.5, 0.75, 1.0] {
        let t = strong_limit_threshold(p, &quad)?;
        println!(
            "{p:>5} {:>10.6} {:>10.6} {:>12.6} {:>6.4} {:>10.2}",
            t.z_star,
            t.rho_star,
            t.derivative,
            weak_limit_threshold(p)?,
            sectional_limit_threshold(p)?
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
