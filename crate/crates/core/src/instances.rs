//! Generators for recovery instances: the one-dimensional-kernel construction
//! where l1 beats l0.5 on a fixed support, and seeded Gaussian problems.

use crate::error::{Error, Result};
use crate::linalg::{null_space_basis, sample_gaussian_matrix, DenseMatrix, GaussianStream, RngSeed};
use crate::solvers::RecoveryInstance;

/// Kernel vector of length `6k`: `1` on the first `k` entries, `-1` on the
/// next `k`, and `1/64` on the remaining `4k`.
pub fn kernel_vector(k: usize) -> Vec<f64> {
    let mut beta = vec![1.0 / 64.0; 6 * k];
    beta[..k].fill(1.0);
    beta[k..2 * k].fill(-1.0);
    beta
}

/// `(6k-1) x 6k` matrix whose null space is spanned by [`kernel_vector`].
/// Rows are an orthonormal basis of the complement of the kernel.
pub fn kernel_measurement(k: usize) -> Result<DenseMatrix> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let beta = kernel_vector(k);
    let row = DenseMatrix::from_rows(&[beta])?;
    Ok(null_space_basis(&row)?.transpose())
}

/// The `2k`-sparse nonnegative vector: `9` on the first `k` entries, `1` on the next `k`.
pub fn two_level_sparse(k: usize) -> Vec<f64> {
    let mut x = vec![0.0; 6 * k];
    x[..k].fill(9.0);
    x[k..2 * k].fill(1.0);
    x
}

/// `x + h * beta` for the kernel vector.
pub fn shift_along_kernel(x: &[f64], h: f64) -> Vec<f64> {
    let beta = kernel_vector(x.len() / 6);
    x.iter().zip(beta).map(|(u, b)| u + h * b).collect()
}

/// Recovery instance built from [`kernel_measurement`] and [`two_level_sparse`].
pub fn kernel_instance(k: usize, p: f64) -> Result<RecoveryInstance> {
    RecoveryInstance::from_truth(kernel_measurement(k)?, two_level_sparse(k), p)
}

/// `s`-sparse vector with uniformly random support and standard normal values.
pub fn random_sparse_vector(n: usize, s: usize, stream: &mut GaussianStream) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for j in stream.subset(n, s) {
        x[j] = stream.normal();
    }
    x
}

/// Gaussian `m x n` matrix and an `s`-sparse Gaussian vector, both derived from `seed`.
pub fn random_sparse_instance(m: usize, n: usize, s: usize, p: f64, seed: RngSeed) -> Result<RecoveryInstance> {
    if s > n {
        return Err(Error::InvalidArgument(format!("sparsity {s} exceeds dimension {n}")));
    }
    let a = sample_gaussian_matrix(m, n, seed.derive(0));
    let mut stream = GaussianStream::new(seed.derive(1));
    let x = random_sparse_vector(n, s, &mut stream);
    RecoveryInstance::from_truth(a, x, p)
}
