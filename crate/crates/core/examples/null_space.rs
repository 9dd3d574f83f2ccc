// Gaussian sampling, an orthonormal null-space basis, and the weighted
// minimum-norm solve used inside IRLS.

use lp_recovery::linalg::{min_norm_weighted_solve, norm2, null_space_basis, sample_gaussian_matrix, RngSeed};

pub fn run_example() -> lp_recovery::Result<()> {
    let a = sample_gaussian_matrix(5, 8, RngSeed(42));
    let b = null_space_basis(&a)?;
    let ab = a.matmul(&b)?;
    let worst = (0..ab.rows())
        .flat_map(|i| ab.row(i).to_vec())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    println!("A is {}x{}, B is {}x{}, max |AB| = {worst:.2e}", a.rows(), a.cols(), b.rows(), b.cols());

    let y = [1.0, -2.0, 0.5, 0.0, 3.0];
    let w: Vec<f64> = (0..8).map(|i| 1.0 + i as f64).collect();
    let x = min_norm_weighted_solve(&a, &y, &w)?;
    let residual: Vec<f64> = a.matvec(&x)?.iter().zip(&y).map(|(l, r)| l - r).collect();
    println!("weighted min-norm x = {x:.4?}");
    println!("||Ax - y|| = {:.1e}", norm2(&residual));
    Ok(())
}

#[allow(dead_code)]
fn main() -> lp_recovery::Result<()> {
    run_example()
}
