// How often the weak condition is falsified on random Gaussian kernels on
// either side of the 2/3 threshold.

use lp_recovery::conditions::SearchBudget;
use lp_recovery::experiments::{run_weak_threshold_probe, WeakProbeSpec};
use lp_recovery::linalg::RngSeed;

pub fn run_example() -> lp_recovery::Result<()> {
    for p in [0.5, 1.0] {
        let spec = WeakProbeSpec {
            n: 200,
            codim: 4,
            p,
            rho_list: vec![0.4, 0.6, 0.75, 0.9],
            trials: 5,
            budget: SearchBudget {
                sphere_samples: 500,
                ..SearchBudget::default()
            },
            seed: RngSeed(8),
        };
        let report = run_weak_threshold_probe(&spec)?;
        let freq: Vec<String> = report
            .points
            .iter()
            .map(|pt| format!("rho {}: {:.2}", pt.rho, pt.success_rate))
            .collect();
        println!("p={p} ({}): {}", report.points[0].mode, freq.join(", "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
