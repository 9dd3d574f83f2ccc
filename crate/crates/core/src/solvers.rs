//! The three recovery programs: l1 by linear programming, lp (0 < p < 1) by
//! iteratively reweighted least squares, and exhaustive l0 for small instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{least_squares, min_norm_weighted_solve, norm2, norm_inf, DenseMatrix};
use crate::simplex::solve_standard_form;

/// Distance in l2 below which an estimate counts as a successful recovery.
pub const RECOVERY_TOL: f64 = 1e-4;

/// `min ||x||_p  s.t.  A x = y`, optionally with the vector that generated `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryInstance {
    pub a: DenseMatrix,
    pub y: Vec<f64>,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_true: Option<Vec<f64>>,
}

impl RecoveryInstance {
    pub fn new(a: DenseMatrix, y: Vec<f64>, p: f64, x_true: Option<Vec<f64>>) -> Result<Self> {
        let inst = RecoveryInstance { a, y, p, x_true };
        inst.validate()?;
        Ok(inst)
    }

    /// Builds `y = A x` and keeps `x` as ground truth.
    pub fn from_truth(a: DenseMatrix, x: Vec<f64>, p: f64) -> Result<Self> {
        let y = a.matvec(&x)?;
        Self::new(a, y, p, Some(x))
    }

    pub fn validate(&self) -> Result<()> {
        if self.y.len() != self.a.rows() {
            return Err(Error::InvalidArgument(format!(
                "y has {} entries but A has {} rows",
                self.y.len(),
                self.a.rows()
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Domain(format!("p must lie in [0, 1], got {}", self.p)));
        }
        if self.y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("y contains non-finite entries".into()));
        }
        if let Some(x) = &self.x_true {
            if x.len() != self.a.cols() {
                return Err(Error::InvalidArgument(format!(
                    "x_true has {} entries but A has {} columns",
                    x.len(),
                    self.a.cols()
                )));
            }
            let resid = self.residual(x)?;
            if resid > 1e-8 * (1.0 + norm2(&self.y)) {
                return Err(Error::InvalidArgument(format!(
                    "x_true does not reproduce y (residual {resid:e})"
                )));
            }
        }
        Ok(())
    }

    /// `||A x - y||_2`.
    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        let ax = self.a.matvec(x)?;
        Ok(norm2(&ax.iter().zip(&self.y).map(|(u, v)| u - v).collect::<Vec<_>>()))
    }

    fn recovered(&self, x_hat: &[f64]) -> Option<bool> {
        self.x_true.as_ref().map(|x| {
            let d: Vec<f64> = x_hat.iter().zip(x).map(|(u, v)| u - v).collect();
            norm2(&d) <= RECOVERY_TOL
        })
    }
}

/// Why an iterative solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    IterationLimit,
    /// The reweighted system became too ill-conditioned; the last iterate is returned.
    IllConditioned,
    /// The LP stopped but its optimality certificate failed the tolerance check.
    Uncertified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub x_hat: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recovered: Option<bool>,
    pub termination: Termination,
    /// `||A x_hat - y||_2`.
    pub residual: f64,
    /// Primal minus dual objective of the LP certificate (l1 only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duality_gap: Option<f64>,
}

/// `sum |x_i|^p` for `p > 0`; the number of nonzero entries for `p = 0`, with
/// entries below `1e-12 * ||x||_inf` treated as zero.
pub fn lp_quasinorm(x: &[f64], p: f64) -> f64 {
    if p == 0.0 {
        let cut = 1e-12 * norm_inf(x);
        x.iter().filter(|v| v.abs() > cut).count() as f64
    } else {
        x.iter().map(|v| v.abs().powf(p)).sum()
    }
}

fn check_underdetermined(a: &DenseMatrix) -> Result<()> {
    if a.rows() >= a.cols() {
        return Err(Error::InvalidArgument(format!(
            "expected fewer measurements than unknowns, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// Minimizes `||x||_1` subject to `A x = y` with the split `x = u - v`,
/// `u, v >= 0`, solved by the dense simplex method. The optimum is certified
/// by dual feasibility `||A^T pi||_inf <= 1` and a zero duality gap; a failed
/// certificate is reported as `converged = false`.
pub fn solve_l1(inst: &RecoveryInstance) -> Result<SolverResult> {
    inst.validate()?;
    let a = &inst.a;
    check_underdetermined(a)?;
    let (m, n) = (a.rows(), a.cols());
    let mut split = DenseMatrix::zeros(m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            split.set(i, j, a.get(i, j));
            split.set(i, n + j, -a.get(i, j));
        }
    }
    let cost = vec![1.0; 2 * n];
    let max_pivots = 50 * (m + 2 * n) + 1000;
    // The program is positively homogeneous in y; solve at unit scale.
    let scale = norm_inf(&inst.y);
    let unit_y: Vec<f64> = inst.y.iter().map(|v| if scale > 0.0 { v / scale } else { 0.0 }).collect();
    let lp = solve_standard_form(&split, &unit_y, &cost, max_pivots)?;
    let x_hat: Vec<f64> = (0..n).map(|j| scale * (lp.x[j] - lp.x[n + j])).collect();
    let objective = lp_quasinorm(&x_hat, 1.0);

    let dual_value: f64 = lp.duals.iter().zip(&inst.y).map(|(u, v)| u * v).sum();
    let at_pi = a.transpose().matvec(&lp.duals)?;
    let gap = objective - dual_value;
    let certified = norm_inf(&at_pi) <= 1.0 + 1e-8 && gap.abs() <= 1e-8 * (1.0 + objective);
    Ok(SolverResult {
        recovered: inst.recovered(&x_hat),
        residual: inst.residual(&x_hat)?,
        x_hat,
        objective,
        iterations: lp.pivots,
        converged: certified,
        termination: if certified {
            Termination::Converged
        } else {
            Termination::Uncertified
        },
        duality_gap: Some(gap),
    })
}

/// Smoothing schedule for the reweighted least-squares iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrlsConfig {
    pub epsilon_init: f64,
    pub epsilon_floor: f64,
    pub epsilon_shrink: f64,
    pub inner_tol: f64,
    pub max_outer: usize,
}

impl Default for IrlsConfig {
    fn default() -> Self {
        IrlsConfig {
            epsilon_init: 1.0,
            epsilon_floor: 1e-8,
            epsilon_shrink: 0.1,
            inner_tol: 1e-9,
            max_outer: 500,
        }
    }
}

impl IrlsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_floor > 0.0 && self.epsilon_init > self.epsilon_floor && self.epsilon_init.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "need epsilon_init > epsilon_floor > 0, got {} and {}",
                self.epsilon_init, self.epsilon_floor
            )));
        }
        if !(self.epsilon_shrink > 0.0 && self.epsilon_shrink < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon_shrink must lie in (0, 1), got {}",
                self.epsilon_shrink
            )));
        }
        if !(self.inner_tol > 0.0) || self.max_outer == 0 {
            return Err(Error::InvalidArgument("inner_tol and max_outer must be positive".into()));
        }
        Ok(())
    }
}

/// One accepted reweighting step: the smoothed objective
/// `sum (x_i^2 + eps^2)^{p/2}` before and after, at the step's `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrlsStep {
    pub epsilon: f64,
    pub before: f64,
    pub after: f64,
    pub step_norm: f64,
}

fn smoothed_objective(x: &[f64], eps: f64, p: f64) -> f64 {
    x.iter().map(|v| (v * v + eps * eps).powf(p / 2.0)).sum()
}

/// Local minimizer of `||x||_p^p` subject to `A x = y` for `0 < p < 1`.
pub fn solve_lp_irls(inst: &RecoveryInstance, cfg: &IrlsConfig) -> Result<SolverResult> {
    solve_lp_irls_traced(inst, cfg).map(|(r, _)| r)
}

/// [`solve_lp_irls`] that also returns every accepted step.
pub fn solve_lp_irls_traced(inst: &RecoveryInstance, cfg: &IrlsConfig) -> Result<(SolverResult, Vec<IrlsStep>)> {
    inst.validate()?;
    cfg.validate()?;
    let p = inst.p;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("IRLS needs 0 < p < 1, got {p}")));
    }
    let a = &inst.a;
    check_underdetermined(a)?;
    let n = a.cols();
    let finish = |x: Vec<f64>, iterations: usize, termination: Termination| -> Result<SolverResult> {
        Ok(SolverResult {
            objective: lp_quasinorm(&x, p),
            recovered: inst.recovered(&x),
            residual: inst.residual(&x)?,
            x_hat: x,
            iterations,
            converged: termination == Termination::Converged,
            termination,
            duality_gap: None,
        })
    };

    if norm_inf(&inst.y) == 0.0 {
        return Ok((finish(vec![0.0; n], 1, Termination::Converged)?, Vec::new()));
    }

    let mut x = min_norm_weighted_solve(a, &inst.y, &vec![1.0; n])?;
    let mut eps = cfg.epsilon_init;
    let mut trace = Vec::new();
    for outer in 1..=cfg.max_outer {
        let w: Vec<f64> = x.iter().map(|v| (v * v + eps * eps).powf(p / 2.0 - 1.0)).collect();
        let next = match min_norm_weighted_solve(a, &inst.y, &w) {
            Ok(next) => next,
            Err(Error::IllConditioned { .. }) => {
                return Ok((finish(x, outer - 1, Termination::IllConditioned)?, trace));
            }
            Err(e) => return Err(e),
        };
        let step: Vec<f64> = next.iter().zip(&x).map(|(u, v)| u - v).collect();
        let step_norm = norm2(&step);
        trace.push(IrlsStep {
            epsilon: eps,
            before: smoothed_objective(&x, eps, p),
            after: smoothed_objective(&next, eps, p),
            step_norm,
        });
        let scale = norm2(&x).max(1.0);
        x = next;
        if eps <= cfg.epsilon_floor && step_norm <= cfg.inner_tol * scale {
            return Ok((finish(x, outer, Termination::Converged)?, trace));
        }
        if step_norm <= eps.sqrt() / 100.0 {
            eps = (eps * cfg.epsilon_shrink).max(cfg.epsilon_floor);
        }
    }
    Ok((finish(x, cfg.max_outer, Termination::IterationLimit)?, trace))
}

/// Sparsest solution by enumerating supports in increasing size. A support is
/// accepted when the least-squares residual on its columns is at most
/// `1e-9 * ||y||_2`.
pub fn solve_l0_exhaustive(inst: &RecoveryInstance, max_support: usize) -> Result<SolverResult> {
    inst.validate()?;
    let a = &inst.a;
    let (m, n) = (a.rows(), a.cols());
    if n > 24 && max_support > 4 {
        return Err(Error::InvalidArgument(format!(
            "exhaustive search over n = {n} columns is limited to supports of size 4, got {max_support}"
        )));
    }
    let ynorm = norm2(&inst.y);
    let finish = |x: Vec<f64>, iterations: usize| -> Result<SolverResult> {
        Ok(SolverResult {
            objective: lp_quasinorm(&x, 0.0),
            recovered: inst.recovered(&x),
            residual: inst.residual(&x)?,
            x_hat: x,
            iterations,
            converged: true,
            termination: Termination::Converged,
            duality_gap: None,
        })
    };
    if ynorm == 0.0 {
        return finish(vec![0.0; n], 0);
    }
    let mut tried = 0;
    for k in 1..=max_support.min(m).min(n) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            tried += 1;
            match least_squares(&a.select_cols(&idx), &inst.y) {
                Ok((coef, resid)) if resid <= 1e-9 * ynorm => {
                    let mut x = vec![0.0; n];
                    for (&j, c) in idx.iter().zip(coef) {
                        x[j] = c;
                    }
                    return finish(x, tried);
                }
                Ok(_) | Err(Error::RankDeficient { .. }) => {}
                Err(e) => return Err(e),
            }
            if !next_combination(&mut idx, n) {
                break;
            }
        }
    }
    Err(Error::Budget(format!(
        "no support of size <= {max_support} reproduces y ({tried} supports tried)"
    )))
}

/// Advances `idx` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
        return false;
    };
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}
