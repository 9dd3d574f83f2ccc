//! Dense real matrices, seeded Gaussian sampling and orthogonal factorizations.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite entry at row {}, column {}",
                pos / cols.max(1) + 1,
                pos % cols.max(1) + 1
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from equally long rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidArgument("rows have different lengths".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// An `n x 1` matrix holding `v`.
    pub fn column(v: &[f64]) -> Result<Self> {
        Self::new(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column_vec(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::InvalidArgument(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::InvalidArgument(format!(
                "vector of length {} does not match {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Sub-matrix of the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        DenseMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Sub-matrix of the given columns, in the given order.
    pub fn select_cols(&self, idx: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.rows);
        for i in 0..self.rows {
            data.extend(idx.iter().map(|&j| self.get(i, j)));
        }
        DenseMatrix {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    /// Multiplies column `j` by `scale[j]`.
    pub fn scale_cols(&self, scale: &[f64]) -> DenseMatrix {
        let mut out = self.clone();
        for i in 0..self.rows {
            for (v, s) in out.data[i * self.cols..(i + 1) * self.cols].iter_mut().zip(scale) {
                *v *= s;
            }
        }
        out
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Seed of a deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Independent child seed for sub-task `index` (SplitMix64 finalizer).
    pub fn derive(self, index: u64) -> RngSeed {
        let mut z = self
            .0
            .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}

/// Standard normal variates by Box-Muller over a ChaCha8 uniform stream.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: RngSeed) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed.0),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n` (rejection sampling, no modulo bias).
    pub fn below(&mut self, n: usize) -> usize {
        let n = n as u64;
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.rng.next_u64();
            if v < zone {
                return (v % n) as usize;
            }
        }
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * angle.sin());
        r * angle.cos()
    }

    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    /// `k` distinct indices from `0..n`, sorted (partial Fisher-Yates).
    pub fn subset(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k.min(n) {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        let mut out = pool[..k.min(n)].to_vec();
        out.sort_unstable();
        out
    }
}

/// `m x n` matrix of i.i.d. N(0,1) entries, filled row by row from one stream.
pub fn sample_gaussian_matrix(m: usize, n: usize, seed: RngSeed) -> DenseMatrix {
    let mut g = GaussianStream::new(seed);
    DenseMatrix {
        rows: m,
        cols: n,
        data: g.normal_vec(m * n),
    }
}

/// Householder QR of a tall matrix `a` (`rows >= cols`).
struct Householder {
    rows: usize,
    cols: usize,
    /// Column-major copy of `a`, overwritten by `R` above the diagonal.
    work: Vec<f64>,
    /// Reflector `k` acts on rows `k..`; stored normalized with `v[0] = 1` implied by `betas`.
    vectors: Vec<Vec<f64>>,
    betas: Vec<f64>,
    diag: Vec<f64>,
}

impl Householder {
    fn factor(a: &DenseMatrix) -> Householder {
        let (rows, cols) = (a.rows, a.cols);
        let mut work = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                work[j * rows + i] = a.get(i, j);
            }
        }
        let mut vectors = Vec::with_capacity(cols);
        let mut betas = Vec::with_capacity(cols);
        let mut diag = Vec::with_capacity(cols);
        for k in 0..cols.min(rows) {
            let col = &work[k * rows + k..(k + 1) * rows];
            let norm = norm2(col);
            let alpha = if col[0] >= 0.0 { -norm } else { norm };
            let mut v = col.to_vec();
            v[0] -= alpha;
            let vnorm2 = dot(&v, &v);
            let beta = if vnorm2 > 0.0 { 2.0 / vnorm2 } else { 0.0 };
            for j in k..cols {
                let c = &mut work[j * rows + k..(j + 1) * rows];
                let s = beta * dot(&v, c);
                for (ci, vi) in c.iter_mut().zip(&v) {
                    *ci -= s * vi;
                }
            }
            diag.push(work[k * rows + k]);
            vectors.push(v);
            betas.push(beta);
        }
        Householder {
            rows,
            cols,
            work,
            vectors,
            betas,
            diag,
        }
    }

    /// Applies `Q = H_0 H_1 ... H_{k-1}` to `x` in place.
    fn apply_q(&self, x: &mut [f64]) {
        for k in (0..self.vectors.len()).rev() {
            let v = &self.vectors[k];
            let s = self.betas[k] * dot(v, &x[k..]);
            for (xi, vi) in x[k..].iter_mut().zip(v) {
                *xi -= s * vi;
            }
        }
    }

    /// Applies `Q^T` to `x` in place.
    fn apply_qt(&self, x: &mut [f64]) {
        for k in 0..self.vectors.len() {
            let v = &self.vectors[k];
            let s = self.betas[k] * dot(v, &x[k..]);
            for (xi, vi) in x[k..].iter_mut().zip(v) {
                *xi -= s * vi;
            }
        }
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        self.work[j * self.rows + i]
    }

    fn diag_ratio(&self) -> (f64, f64) {
        let max = self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let min = self.diag.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
        (min, max)
    }

    /// Solves `R^T v = y` by forward substitution.
    fn solve_rt(&self, y: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.cols];
        for i in 0..self.cols {
            let mut s = y[i];
            for k in 0..i {
                s -= self.r(k, i) * v[k];
            }
            v[i] = s / self.r(i, i);
        }
        v
    }

    /// Solves `R x = b` by back substitution on the leading `cols` entries.
    fn solve_r(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.cols];
        for i in (0..self.cols).rev() {
            let mut s = b[i];
            for k in i + 1..self.cols {
                s -= self.r(i, k) * x[k];
            }
            x[i] = s / self.r(i, i);
        }
        x
    }
}

/// Relative size below which a triangular factor entry counts as zero.
const RANK_TOL: f64 = 1e-10;

/// QR factorization of a nonsingular square matrix for repeated solves.
pub(crate) struct SquareSolver(Householder);

impl SquareSolver {
    pub(crate) fn new(a: &DenseMatrix) -> Result<Self> {
        if a.rows != a.cols || a.rows == 0 {
            return Err(Error::InvalidArgument(format!("expected a square matrix, got {}x{}", a.rows, a.cols)));
        }
        let qr = Householder::factor(a);
        let (min, max) = qr.diag_ratio();
        if !(min > RANK_TOL * max) {
            return Err(Error::RankDeficient {
                ratio: if max > 0.0 { min / max } else { 0.0 },
            });
        }
        Ok(SquareSolver(qr))
    }

    /// `A^{-1} b`.
    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut qtb = b.to_vec();
        self.0.apply_qt(&mut qtb);
        self.0.solve_r(&qtb)
    }

    /// `A^{-T} c`.
    pub(crate) fn solve_transpose(&self, c: &[f64]) -> Vec<f64> {
        let mut v = self.0.solve_rt(c);
        self.0.apply_q(&mut v);
        v
    }
}

/// Orthonormal basis (as columns) of the null space of a full-row-rank `m x n`
/// matrix with `m < n`, from the Householder QR of `A^T`.
pub fn null_space_basis(a: &DenseMatrix) -> Result<DenseMatrix> {
    let (m, n) = (a.rows, a.cols);
    if m == 0 || m >= n {
        return Err(Error::InvalidArgument(format!(
            "null space basis needs 1 <= rows < cols, got {m}x{n}"
        )));
    }
    let qr = Householder::factor(&a.transpose());
    let (min, max) = qr.diag_ratio();
    if !(min > RANK_TOL * max) {
        return Err(Error::RankDeficient {
            ratio: if max > 0.0 { min / max } else { 0.0 },
        });
    }
    let k = n - m;
    let mut b = DenseMatrix::zeros(n, k);
    let mut e = vec![0.0; n];
    for j in 0..k {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[m + j] = 1.0;
        qr.apply_q(&mut e);
        for (i, v) in e.iter().enumerate() {
            b.set(i, j, *v);
        }
    }
    Ok(b)
}

/// Largest condition estimate accepted for the weighted Gram matrix.
const MAX_CONDITION: f64 = 1e14;

/// `argmin sum w_i x_i^2` subject to `A x = y`, i.e. `W^{-1} A^T (A W^{-1} A^T)^{-1} y`.
pub fn min_norm_weighted_solve(a: &DenseMatrix, y: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    let (m, n) = (a.rows, a.cols);
    if y.len() != m || w.len() != n {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch: A is {m}x{n}, y has {}, w has {}",
            y.len(),
            w.len()
        )));
    }
    if m > n {
        return Err(Error::InvalidArgument(format!("system is overdetermined ({m}x{n})")));
    }
    if let Some(bad) = w.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument(format!("weights must be positive and finite, got {bad}")));
    }
    let d: Vec<f64> = w.iter().map(|v| v.sqrt().recip()).collect();
    let scaled = a.scale_cols(&d);
    let qr = Householder::factor(&scaled.transpose());
    let (min, max) = qr.diag_ratio();
    let estimate = if min > 0.0 { (max / min).powi(2) } else { f64::INFINITY };
    if !(estimate <= MAX_CONDITION) {
        return Err(Error::IllConditioned { estimate });
    }
    // (A D)(A D)^T = R^T R, so x~ = Q [R^{-T} y; 0] and x = D x~.
    let v = qr.solve_rt(y);
    let mut z = vec![0.0; n];
    z[..m].copy_from_slice(&v);
    qr.apply_q(&mut z);
    Ok(z.iter().zip(&d).map(|(zi, di)| zi * di).collect())
}

/// Least-squares solution of an overdetermined or square full-column-rank
/// system, together with the residual norm `||A x - b||_2`.
pub fn least_squares(a: &DenseMatrix, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (m, n) = (a.rows, a.cols);
    if b.len() != m || n > m || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "least squares needs 1 <= cols <= rows and matching rhs, got {m}x{n} and {}",
            b.len()
        )));
    }
    let qr = Householder::factor(a);
    let (min, max) = qr.diag_ratio();
    if !(min > RANK_TOL * max) {
        return Err(Error::RankDeficient {
            ratio: if max > 0.0 { min / max } else { 0.0 },
        });
    }
    let mut qtb = b.to_vec();
    qr.apply_qt(&mut qtb);
    let x = qr.solve_r(&qtb);
    let r = a.matvec(&x)?;
    let resid = norm2(&r.iter().zip(b).map(|(ri, bi)| ri - bi).collect::<Vec<_>>());
    Ok((x, resid))
}
