// Empirical success rate of IRLS (p < 1) and l1 (p = 1) against sparsity.

use lp_recovery::experiments::{run_phase_transition, AmplitudeModel, PhaseDiagramSpec};
use lp_recovery::linalg::RngSeed;

pub fn run_example() -> lp_recovery::Result<()> {
    let spec = PhaseDiagramSpec {
        n: 40,
        m: 20,
        p_list: vec![0.5, 1.0],
        rho_grid: vec![0.05, 0.15, 0.25, 0.35],
        trials_per_point: 10,
        amplitude_model: AmplitudeModel::StandardNormal,
        seed: RngSeed(1),
    };
    let report = run_phase_transition(&spec)?;
    report.write_csv(std::io::stdout())?;
    println!("# {} points in {:.1?}", report.points.len(), report.wall_time);
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
