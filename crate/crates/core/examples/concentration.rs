// Concentration of the top-rho sum of |X_i|^p around half the total at the
// limiting strong threshold, and of the sign-split sums on a fixed support.

use lp_recovery::experiments::{run_concentration_check, ConcentrationSpec};
use lp_recovery::linalg::RngSeed;

pub fn run_example() -> lp_recovery::Result<()> {
    for p in [0.5, 1.0] {
        let r = run_concentration_check(&ConcentrationSpec::new(20_000, p, None, 20, RngSeed(11)))?;
        println!(
            "p={p}: rho*={:.4}, expected ratio {:.4}, ratio quantiles {:.4}/{:.4}/{:.4}, in band {:.2}",
            r.rho,
            r.expected_ratio,
            r.ratio_quantiles.q05,
            r.ratio_quantiles.q50,
            r.ratio_quantiles.q95,
            r.ratio_in_band
        );
        println!(
            "      T- average median {:.4} vs mu/2 = {:.4}; both brackets hold in {:.2}",
            r.t_minus_quantiles.q50,
            r.mu / 2.0,
            r.both_brackets
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
