//! Dense two-phase primal simplex for `min c^T x  s.t.  M x = b, x >= 0`.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SquareSolver};

const PIVOT_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_SWITCH: usize = 20;
/// Pivots between rebuilds of the tableau from the original data.
const REFACTOR_EVERY: usize = 40;

/// Optimal basic solution.
#[derive(Debug, Clone)]
pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    /// Equality-constraint multipliers `pi` with `M^T pi <= c` at optimality.
    pub duals: Vec<f64>,
    pub pivots: usize,
}

/// Tableau over `[M | I | b]` (rows with negative `b` flipped), one objective
/// row at the bottom. Columns `cols..cols + rows` are the artificials.
struct Tableau {
    rows: usize,
    cols: usize,
    width: usize,
    t: Vec<f64>,
    original: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(m: &DenseMatrix, b: &[f64]) -> Tableau {
        let (rows, cols) = (m.rows(), m.cols());
        let width = cols + rows + 1;
        let mut original = vec![0.0; rows * width];
        for i in 0..rows {
            let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..cols {
                original[i * width + j] = sign * m.get(i, j);
            }
            original[i * width + cols + i] = 1.0;
            original[i * width + width - 1] = sign * b[i];
        }
        let mut t = original.clone();
        t.extend(std::iter::repeat_n(0.0, width));
        Tableau {
            rows,
            cols,
            width,
            t,
            original,
            cost: vec![0.0; width - 1],
            basis: (cols..cols + rows).collect(),
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    /// Installs a cost vector and recomputes the objective row from the current rows.
    fn set_cost(&mut self, cost: Vec<f64>) {
        self.cost = cost;
        let (rows, w) = (self.rows, self.width);
        for j in 0..w {
            let mut v = if j < w - 1 { self.cost[j] } else { 0.0 };
            for i in 0..rows {
                v -= self.cost[self.basis[i]] * self.at(i, j);
            }
            self.t[rows * w + j] = v;
        }
    }

    fn basis_solver(&self) -> Result<SquareSolver> {
        let (rows, w) = (self.rows, self.width);
        let mut bmat = DenseMatrix::zeros(rows, rows);
        for (k, &j) in self.basis.iter().enumerate() {
            for i in 0..rows {
                bmat.set(i, k, self.original[i * w + j]);
            }
        }
        SquareSolver::new(&bmat)
    }

    /// Rebuilds every row as `B^{-1}` times the original data.
    fn refactor(&mut self) {
        let (rows, w) = (self.rows, self.width);
        let Ok(solver) = self.basis_solver() else {
            return;
        };
        let mut column = vec![0.0; rows];
        for j in 0..w {
            for i in 0..rows {
                column[i] = self.original[i * w + j];
            }
            let solved = solver.solve(&column);
            for i in 0..rows {
                self.t[i * w + j] = solved[i];
            }
        }
        for (k, &j) in self.basis.iter().enumerate() {
            for i in 0..rows {
                self.t[i * w + j] = if i == k { 1.0 } else { 0.0 };
            }
        }
        let cost = std::mem::take(&mut self.cost);
        self.set_cost(cost);
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.at(r, c);
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..=self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f != 0.0 {
                for (dst, src) in self.t[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *dst -= f * src;
                }
            }
        }
        self.basis[r] = c;
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let obj = self.rows;
        let mut candidates = (0..self.cols).filter(|&j| self.at(obj, j) < -PIVOT_TOL);
        if bland {
            candidates.next()
        } else {
            candidates.min_by(|&a, &b| self.at(obj, a).total_cmp(&self.at(obj, b)))
        }
    }

    /// Dantzig's rule (most negative reduced cost), switching to Bland's rule
    /// (smallest index) after a run of degenerate pivots so cycling cannot occur.
    fn run(&mut self, max_pivots: usize, pivots: &mut usize) -> Result<()> {
        let rhs = self.width - 1;
        let mut degenerate_run = 0;
        let mut since_refactor = 0;
        loop {
            let bland = degenerate_run >= DEGENERATE_SWITCH;
            let c = match self.entering(bland) {
                Some(c) => c,
                None if since_refactor == 0 => return Ok(()),
                None => {
                    // Confirm optimality on a freshly rebuilt tableau.
                    self.refactor();
                    since_refactor = 0;
                    continue;
                }
            };
            let mut best: Option<(f64, usize)> = None;
            for i in 0..self.rows {
                let a = self.at(i, c);
                if a > PIVOT_TOL {
                    let ratio = self.at(i, rhs).max(0.0) / a;
                    let better = match best {
                        None => true,
                        Some((r, bi)) => {
                            ratio < r - 1e-12 || (ratio <= r + 1e-12 && self.basis[i] < self.basis[bi])
                        }
                    };
                    if better {
                        best = Some((ratio, i));
                    }
                }
            }
            let Some((step, r)) = best else {
                if since_refactor > 0 {
                    self.refactor();
                    since_refactor = 0;
                    continue;
                }
                return Err(Error::Unbounded("linear program is unbounded below".into()));
            };
            degenerate_run = if step <= 1e-12 { degenerate_run + 1 } else { 0 };
            self.pivot(r, c);
            *pivots += 1;
            since_refactor += 1;
            if *pivots > max_pivots {
                return Err(Error::IterationLimit(max_pivots));
            }
            if since_refactor >= REFACTOR_EVERY {
                self.refactor();
                since_refactor = 0;
            }
        }
    }
}

/// Solves the standard-form LP. `m` is `rows x cols`, `b` has `rows` entries.
pub(crate) fn solve_standard_form(m: &DenseMatrix, b: &[f64], c: &[f64], max_pivots: usize) -> Result<LpSolution> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut tab = Tableau::new(m, b);
    let width = tab.width;

    let mut phase_one = vec![0.0; width - 1];
    phase_one[cols..].fill(1.0);
    tab.set_cost(phase_one);
    let mut pivots = 0;
    tab.run(max_pivots, &mut pivots)?;
    let infeasibility = -tab.at(rows, width - 1);
    let scale = 1.0 + b.iter().map(|v| v.abs()).sum::<f64>();
    if infeasibility > 1e-9 * scale {
        return Err(Error::Infeasible(format!(
            "no x >= 0 satisfies the constraints (phase I residual {infeasibility:e})"
        )));
    }
    // Drive zero-level artificials out of the basis.
    for r in 0..rows {
        if tab.basis[r] >= cols {
            if let Some(c) = (0..cols).find(|&j| tab.at(r, j).abs() > PIVOT_TOL) {
                tab.pivot(r, c);
                pivots += 1;
            }
        }
    }

    let mut phase_two = vec![0.0; width - 1];
    phase_two[..cols].copy_from_slice(c);
    tab.cost = phase_two;
    tab.refactor();
    tab.run(max_pivots, &mut pivots)?;

    // Basic values and duals from the original data.
    let solver = tab.basis_solver()?;
    let rhs: Vec<f64> = (0..rows).map(|i| tab.original[i * width + width - 1]).collect();
    let xb = solver.solve(&rhs);
    let mut x = vec![0.0; cols];
    for (&j, v) in tab.basis.iter().zip(&xb) {
        if j < cols {
            x[j] = v.max(0.0);
        }
    }
    let cb: Vec<f64> = tab.basis.iter().map(|&j| tab.cost[j]).collect();
    let signed_duals = solver.solve_transpose(&cb);
    // Rows with negative b were flipped; undo the flip on the multipliers.
    let duals = signed_duals
        .iter()
        .zip(b)
        .map(|(d, bi)| if *bi < 0.0 { -d } else { *d })
        .collect();
    Ok(LpSolution { x, duals, pivots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_lp() {
        // min -x1 - 2 x2 s.t. x1 + x2 + s1 = 4, x1 + 3 x2 + s2 = 6
        let m = DenseMatrix::from_rows(&[vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]]).unwrap();
        let sol = solve_standard_form(&m, &[4.0, 6.0], &[-1.0, -2.0, 0.0, 0.0], 1000).unwrap();
        assert!((sol.x[0] - 3.0).abs() < 1e-12 && (sol.x[1] - 1.0).abs() < 1e-12);
        // pi = (-1/2, -1/2) satisfies M^T pi <= c with equality on the basis.
        assert!((sol.duals[0] + 0.5).abs() < 1e-12 && (sol.duals[1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_duals() {
        // min x1 + x2 s.t. -x1 - x2 = -2: optimum 2 with multiplier -1.
        let m = DenseMatrix::from_rows(&[vec![-1.0, -1.0]]).unwrap();
        let sol = solve_standard_form(&m, &[-2.0], &[1.0, 1.0], 100).unwrap();
        assert!((sol.x[0] + sol.x[1] - 2.0).abs() < 1e-12);
        assert!((sol.duals[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_lp() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let err = solve_standard_form(&m, &[-1.0], &[1.0, 1.0], 100).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
    }

    #[test]
    fn unbounded_lp() {
        let m = DenseMatrix::from_rows(&[vec![1.0, -1.0]]).unwrap();
        let err = solve_standard_form(&m, &[1.0], &[0.0, -1.0], 100).unwrap_err();
        assert!(matches!(err, Error::Unbounded(_)));
    }
}
