// Basis pursuit by linear programming on a random sparse instance, checked
// against exhaustive l0 search.

use lp_recovery::instances::random_sparse_instance;
use lp_recovery::linalg::RngSeed;
use lp_recovery::solvers::{solve_l0_exhaustive, solve_l1};

pub fn run_example() -> lp_recovery::Result<()> {
    let inst = random_sparse_instance(6, 12, 2, 1.0, RngSeed(2026))?;
    let l1 = solve_l1(&inst)?;
    let l0 = solve_l0_exhaustive(&inst, 3)?;
    println!(
        "l1: objective {:.6}, recovered {:?}, duality gap {:.1e}, {} pivots",
        l1.objective,
        l1.recovered,
        l1.duality_gap.unwrap_or(f64::NAN),
        l1.iterations
    );
    println!("l0: support size {}, recovered {:?}", l0.objective, l0.recovered);
    let diff = l1.x_hat.iter().zip(&l0.x_hat).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max |x_l1 - x_l0| = {diff:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
