// IRLS for l_p minimization: a random recoverable instance, and the kernel
// construction where a shifted vector has smaller l_0.5 quasinorm than the
// sparse one.

use lp_recovery::instances::{kernel_instance, random_sparse_instance, shift_along_kernel, two_level_sparse};
use lp_recovery::linalg::RngSeed;
use lp_recovery::solvers::{lp_quasinorm, solve_lp_irls_traced, IrlsConfig};

pub fn run_example() -> lp_recovery::Result<()> {
    let cfg = IrlsConfig::default();
    let inst = random_sparse_instance(20, 40, 2, 0.5, RngSeed(7000))?;
    let (r, trace) = solve_lp_irls_traced(&inst, &cfg)?;
    println!(
        "n=40 m=20 2-sparse: recovered {:?} after {} iterations ({:?}), final epsilon {:.0e}",
        r.recovered,
        r.iterations,
        r.termination,
        trace.last().map_or(f64::NAN, |s| s.epsilon)
    );

    let k = 4;
    let x = two_level_sparse(k);
    let r = solve_lp_irls_traced(&kernel_instance(k, 0.5)?, &cfg)?.0;
    println!(
        "kernel construction k={k}: ||x*|| = {}, ||x* + beta|| = {:.4}, IRLS objective {:.4}",
        lp_quasinorm(&x, 0.5),
        lp_quasinorm(&shift_along_kernel(&x, 1.0), 0.5),
        r.objective
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
