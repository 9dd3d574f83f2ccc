// Strong versus weak recovery with one matrix reused for many vectors:
// fixed nonnegative support (weak) or fresh signed supports (strong).

use lp_recovery::experiments::{run_strong_vs_weak, StrongVsWeakSpec};
use lp_recovery::linalg::RngSeed;

pub fn run_example() -> lp_recovery::Result<()> {
    let spec = StrongVsWeakSpec {
        n: 50,
        m: 48,
        p_list: vec![0.5, 1.0],
        rho_grid: vec![0.2, 0.6, 0.9],
        matrices: 5,
        vectors_per_point: 5,
        seed: RngSeed(5),
    };
    let report = run_strong_vs_weak(&spec)?;
    for pt in &report.points {
        println!("{:<6} p={:<4} rho={:<4} success {:.2}", pt.mode, pt.p, pt.rho, pt.success_rate);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
