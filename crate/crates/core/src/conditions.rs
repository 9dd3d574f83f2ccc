//! Null-space conditions for lp recovery, evaluated on a kernel basis `B`
//! (`n x d`, columns spanning the null space of the measurement matrix).
//!
//! A condition quantifies over every nonzero `z` in `R^d`. For `d = 1` only
//! `z = +-1` matter (every condition is positively homogeneous), so the verdict
//! is exact. For `d >= 2` a falsification search is run and `holds = true`
//! means "no violating `z` found within the budget".

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm2, DenseMatrix, GaussianStream, RngSeed};

/// Relative tolerance for zero detection and strict/non-strict comparisons.
const REL_TOL: f64 = 1e-12;
/// Directions scanned on the circle when the kernel is two-dimensional.
pub const ANGULAR_SWEEP: usize = 4096;
/// Number of best samples refined by pattern search.
const REFINE_STARTS: usize = 8;

/// A support `T` (sorted, zero-based) with a sign per index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportPattern {
    support: Vec<usize>,
    signs: Vec<i8>,
}

impl SupportPattern {
    pub fn new(support: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let pat = SupportPattern { support, signs };
        pat.check()?;
        Ok(pat)
    }

    /// All-positive signs on `support`.
    pub fn nonnegative(support: Vec<usize>) -> Result<Self> {
        let signs = vec![1; support.len()];
        Self::new(support, signs)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    fn check(&self) -> Result<()> {
        if self.support.len() != self.signs.len() {
            return Err(Error::InvalidArgument(format!(
                "{} support indices but {} signs",
                self.support.len(),
                self.signs.len()
            )));
        }
        if self.support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("support must be strictly increasing".into()));
        }
        if let Some(s) = self.signs.iter().find(|s| s.abs() != 1) {
            return Err(Error::InvalidArgument(format!("signs must be +1 or -1, got {s}")));
        }
        Ok(())
    }

    /// Checks the pattern against a vector length (also after deserialization).
    pub fn validate_for(&self, n: usize) -> Result<()> {
        self.check()?;
        match self.support.last() {
            Some(&last) if last >= n => Err(Error::InvalidArgument(format!(
                "support index {last} out of range for length {n}"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionMode {
    Strong,
    WeakL1,
    WeakLp,
    WeakL0,
    Sectional,
}

impl ConditionMode {
    /// Exponent actually used by the mode.
    pub fn effective_p(self, p: f64) -> f64 {
        match self {
            ConditionMode::WeakL1 => 1.0,
            ConditionMode::WeakL0 => 0.0,
            _ => p,
        }
    }
}

/// What the condition is quantified over besides `z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionTarget {
    /// Every support of at most this many indices (strong mode).
    Sparsity(usize),
    /// A fixed support and sign pattern (weak modes).
    Pattern(SupportPattern),
    /// A fixed support (sectional mode).
    Support(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub z: Vec<f64>,
    /// Top set for strong mode, pattern support for weak modes, `T` for sectional.
    pub support: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_minus: Option<Vec<usize>>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub mode: ConditionMode,
    pub p: f64,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub certificate_exact: bool,
    /// Smallest `(rhs - lhs) / (|lhs| + |rhs|)` seen over the evaluated directions.
    pub worst_margin: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub sphere_samples: usize,
    pub refine_steps: usize,
    pub step_shrink: f64,
    pub seed: RngSeed,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            sphere_samples: 2000,
            refine_steps: 200,
            step_shrink: 0.5,
            seed: RngSeed(0),
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        if self.sphere_samples == 0 {
            return Err(Error::InvalidArgument("sphere_samples must be at least 1".into()));
        }
        if !(self.step_shrink > 0.0 && self.step_shrink < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "step_shrink must lie in (0, 1), got {}",
                self.step_shrink
            )));
        }
        Ok(())
    }
}

fn project(b: &DenseMatrix, z: &[f64]) -> Vec<f64> {
    (0..b.rows()).map(|i| b.row(i).iter().zip(z).map(|(u, v)| u * v).sum()).collect()
}

fn zero_cut(b: &DenseMatrix, i: usize, znorm: f64) -> f64 {
    REL_TOL * znorm * norm2(b.row(i))
}

fn sum_pow(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    let v: Vec<f64> = values.collect();
    crate::solvers::lp_quasinorm(&v, p)
}

/// Splits `T` into `T-` (where `B_i z` has sign opposite to the pattern) and
/// `T+` (the rest, including `B_i z = 0`).
pub fn partition_support(b: &DenseMatrix, z: &[f64], pat: &SupportPattern) -> (Vec<usize>, Vec<usize>) {
    let bz = project(b, z);
    let znorm = norm2(z);
    let mut minus = Vec::new();
    let mut plus = Vec::new();
    for (&i, &s) in pat.support.iter().zip(&pat.signs) {
        let v = bz[i];
        if v.abs() > zero_cut(b, i, znorm) && v * f64::from(s) < 0.0 {
            minus.push(i);
        } else {
            plus.push(i);
        }
    }
    (minus, plus)
}

fn magnitudes(b: &DenseMatrix, z: &[f64], p: f64) -> Vec<f64> {
    let bz = project(b, z);
    let znorm = norm2(z);
    bz.iter()
        .enumerate()
        .map(|(i, v)| {
            if p == 0.0 {
                f64::from(v.abs() > zero_cut(b, i, znorm))
            } else {
                v.abs().powf(p)
            }
        })
        .collect()
}

/// Indices of the `s` largest magnitudes (ties broken by lower index).
fn top_indices(mags: &[f64], s: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..mags.len()).collect();
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then(a.cmp(&b)));
    let mut top = order[..s.min(mags.len())].to_vec();
    top.sort_unstable();
    top
}

/// `(lhs, rhs)`: the sum of the `rho_n` largest `|B_i z|^p` and the remainder.
pub fn strong_condition_holds_for(b: &DenseMatrix, z: &[f64], p: f64, rho_n: usize) -> (f64, f64) {
    let mags = magnitudes(b, z, p);
    let top = top_indices(&mags, rho_n);
    let mut in_top = vec![false; mags.len()];
    top.iter().for_each(|&i| in_top[i] = true);
    let lhs: f64 = top.iter().map(|&i| mags[i]).sum();
    let rhs: f64 = (0..mags.len()).filter(|&i| !in_top[i]).map(|i| mags[i]).sum();
    (lhs, rhs)
}

/// Evaluates the weak condition for the pattern at `z`: the l1 form for
/// `p = 1`, the l0 form for `p = 0`, and the lp form otherwise (strict only
/// when `B_{T+} z = 0`). Returns `(holds_at_z, lhs, rhs)`.
pub fn weak_condition_holds_for(b: &DenseMatrix, z: &[f64], p: f64, pat: &SupportPattern) -> (bool, f64, f64) {
    let e = weak_evaluation(b, z, p, pat);
    (!e.violated(), e.lhs, e.rhs)
}

/// `(||B_T z||_p^p, ||B_{T^c} z||_p^p)`.
pub fn sectional_condition_holds_for(b: &DenseMatrix, z: &[f64], p: f64, t: &[usize]) -> (f64, f64) {
    let bz = project(b, z);
    let mut in_t = vec![false; bz.len()];
    for &i in t {
        in_t[i] = true;
    }
    let lhs = sum_pow(t.iter().map(|&i| bz[i]), p);
    let rhs = sum_pow((0..bz.len()).filter(|&i| !in_t[i]).map(|i| bz[i]), p);
    (lhs, rhs)
}

#[derive(Debug, Clone)]
struct Evaluation {
    lhs: f64,
    rhs: f64,
    strict: bool,
    support: Vec<usize>,
    t_minus: Option<Vec<usize>>,
}

impl Evaluation {
    fn tol(&self) -> f64 {
        REL_TOL * (self.lhs.abs() + self.rhs.abs())
    }

    fn violated(&self) -> bool {
        if self.strict {
            self.lhs >= self.rhs - self.tol()
        } else {
            self.lhs > self.rhs + self.tol()
        }
    }

    /// Scale-free margin; negative values mean `lhs > rhs`.
    fn margin(&self) -> f64 {
        let scale = self.lhs.abs() + self.rhs.abs();
        if scale == 0.0 {
            0.0
        } else {
            (self.rhs - self.lhs) / scale
        }
    }
}

fn weak_evaluation(b: &DenseMatrix, z: &[f64], p: f64, pat: &SupportPattern) -> Evaluation {
    let (minus, plus) = partition_support(b, z, pat);
    let bz = project(b, z);
    let mut in_t = vec![false; bz.len()];
    for &i in &pat.support {
        in_t[i] = true;
    }
    let outside = || (0..bz.len()).filter(|&i| !in_t[i]).map(|i| bz[i]);
    let lhs = sum_pow(minus.iter().map(|&i| bz[i]), p);
    let (rhs, strict) = if p == 1.0 {
        (sum_pow(outside(), 1.0) + sum_pow(plus.iter().map(|&i| bz[i]), 1.0), true)
    } else if p == 0.0 {
        (sum_pow(outside(), 0.0), true)
    } else {
        let znorm = norm2(z);
        let plus_zero = plus.iter().all(|&i| bz[i].abs() <= zero_cut(b, i, znorm));
        (sum_pow(outside(), p), plus_zero)
    };
    Evaluation {
        lhs,
        rhs,
        strict,
        support: pat.support.clone(),
        t_minus: Some(minus),
    }
}

fn evaluate(b: &DenseMatrix, z: &[f64], mode: ConditionMode, p: f64, target: &ConditionTarget) -> Evaluation {
    match (mode, target) {
        (ConditionMode::Strong, ConditionTarget::Sparsity(s)) => {
            let mags = magnitudes(b, z, p);
            let top = top_indices(&mags, *s);
            let (lhs, rhs) = strong_condition_holds_for(b, z, p, *s);
            Evaluation {
                lhs,
                rhs,
                strict: true,
                support: top,
                t_minus: None,
            }
        }
        (ConditionMode::Sectional, ConditionTarget::Support(t)) => {
            let (lhs, rhs) = sectional_condition_holds_for(b, z, p, t);
            Evaluation {
                lhs,
                rhs,
                strict: true,
                support: t.clone(),
                t_minus: None,
            }
        }
        (_, ConditionTarget::Pattern(pat)) => weak_evaluation(b, z, mode.effective_p(p), pat),
        _ => unreachable!("target checked by validate_target"),
    }
}

fn validate_target(n: usize, mode: ConditionMode, target: &ConditionTarget) -> Result<()> {
    match (mode, target) {
        (ConditionMode::Strong, ConditionTarget::Sparsity(s)) if *s <= n => Ok(()),
        (ConditionMode::Strong, ConditionTarget::Sparsity(s)) => {
            Err(Error::InvalidArgument(format!("sparsity {s} exceeds dimension {n}")))
        }
        (ConditionMode::Sectional, ConditionTarget::Support(t)) => {
            if t.windows(2).any(|w| w[0] >= w[1]) || t.last().is_some_and(|&i| i >= n) {
                Err(Error::InvalidArgument(format!(
                    "support must be strictly increasing indices below {n}"
                )))
            } else {
                Ok(())
            }
        }
        (ConditionMode::WeakL1 | ConditionMode::WeakLp | ConditionMode::WeakL0, ConditionTarget::Pattern(pat)) => {
            pat.validate_for(n)
        }
        _ => Err(Error::InvalidArgument(format!(
            "mode {mode:?} needs {}",
            match mode {
                ConditionMode::Strong => "a sparsity level",
                ConditionMode::Sectional => "a support",
                _ => "a support pattern",
            }
        ))),
    }
}

fn unit(mut z: Vec<f64>) -> Vec<f64> {
    let n = norm2(&z);
    if n > 0.0 {
        z.iter_mut().for_each(|v| *v /= n);
    }
    z
}

struct Search<'a> {
    b: &'a DenseMatrix,
    mode: ConditionMode,
    p: f64,
    target: &'a ConditionTarget,
    evaluations: usize,
    worst: f64,
}

impl Search<'_> {
    fn eval(&mut self, z: &[f64]) -> Evaluation {
        self.evaluations += 1;
        let e = evaluate(self.b, z, self.mode, self.p, self.target);
        self.worst = self.worst.min(e.margin());
        e
    }

    fn eval_all(&mut self, dirs: &[Vec<f64>]) -> Vec<Evaluation> {
        let (b, mode, p, target) = (self.b, self.mode, self.p, self.target);
        let out: Vec<Evaluation> = dirs.par_iter().map(|z| evaluate(b, z, mode, p, target)).collect();
        self.evaluations += out.len();
        self.worst = out.iter().map(Evaluation::margin).fold(self.worst, f64::min);
        out
    }

    /// Coordinate pattern search on the unit sphere minimizing the margin.
    fn refine(&mut self, start: Vec<f64>, budget: &SearchBudget) -> Option<(Vec<f64>, Evaluation)> {
        let mut z = start;
        let mut cur = self.eval(&z);
        let mut step = 0.5;
        for _ in 0..budget.refine_steps {
            if cur.violated() {
                return Some((z, cur));
            }
            let mut improved = false;
            for k in 0..z.len() {
                for sign in [1.0, -1.0] {
                    let mut trial = z.clone();
                    trial[k] += sign * step;
                    let trial = unit(trial);
                    let e = self.eval(&trial);
                    if e.margin() < cur.margin() {
                        z = trial;
                        cur = e;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= budget.step_shrink;
                if step < 1e-12 {
                    break;
                }
            }
        }
        cur.violated().then_some((z, cur))
    }
}

/// Decides whether the condition selected by `mode` holds for every nonzero
/// `z`, exactly when `B` has one column and by falsification search otherwise.
pub fn certify(
    b: &DenseMatrix,
    mode: ConditionMode,
    p: f64,
    target: &ConditionTarget,
    budget: &SearchBudget,
) -> Result<ConditionVerdict> {
    let (n, d) = (b.rows(), b.cols());
    if d == 0 {
        return Err(Error::InvalidArgument("kernel basis has no columns".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0, 1], got {p}")));
    }
    validate_target(n, mode, target)?;
    budget.validate()?;
    let p_eff = mode.effective_p(p);
    let mut search = Search {
        b,
        mode,
        p: p_eff,
        target,
        evaluations: 0,
        worst: f64::INFINITY,
    };
    let exact = d == 1;
    let dirs: Vec<Vec<f64>> = if exact {
        vec![vec![1.0], vec![-1.0]]
    } else if d == 2 {
        (0..ANGULAR_SWEEP)
            .map(|j| {
                let th = std::f64::consts::TAU * j as f64 / ANGULAR_SWEEP as f64;
                vec![th.cos(), th.sin()]
            })
            .collect()
    } else {
        let mut g = GaussianStream::new(budget.seed);
        (0..budget.sphere_samples).map(|_| unit(g.normal_vec(d))).collect()
    };
    let evals = search.eval_all(&dirs);

    // First falsifier in sample order wins unless a later one has a smaller margin.
    let mut order: Vec<usize> = (0..evals.len()).collect();
    order.sort_by(|&a, &b| evals[a].margin().total_cmp(&evals[b].margin()).then(a.cmp(&b)));
    let mut found = order
        .first()
        .filter(|&&i| evals[i].violated())
        .map(|&i| (dirs[i].clone(), evals[i].clone()));
    if found.is_none() && !exact {
        for &i in order.iter().take(REFINE_STARTS) {
            if let Some(hit) = search.refine(dirs[i].clone(), budget) {
                found = Some(hit);
                break;
            }
        }
    }
    let witness = found.map(|(z, e)| Witness {
        z,
        support: e.support,
        t_minus: e.t_minus,
        lhs: e.lhs,
        rhs: e.rhs,
    });
    Ok(ConditionVerdict {
        mode,
        p: p_eff,
        holds: witness.is_none(),
        witness,
        certificate_exact: exact,
        worst_margin: search.worst,
        evaluations: search.evaluations,
    })
}

/// Largest `s` for which the strong condition holds, scanning upward from 0.
pub fn max_strong_sparsity(b: &DenseMatrix, p: f64, budget: &SearchBudget) -> Result<usize> {
    let mut s = 0;
    while s < b.rows() {
        let v = certify(b, ConditionMode::Strong, p, &ConditionTarget::Sparsity(s + 1), budget)?;
        if !v.holds {
            break;
        }
        s += 1;
    }
    Ok(s)
}

/// Re-evaluates a witness from `(z, T)` and the condition data alone, using
/// the partition rule and quasinorms. True when the stored violation is confirmed.
pub fn verify_witness(b: &DenseMatrix, mode: ConditionMode, p: f64, pattern: Option<&SupportPattern>, w: &Witness) -> bool {
    let p = mode.effective_p(p);
    let bz = project(b, &w.z);
    let mut in_t = vec![false; bz.len()];
    for &i in &w.support {
        if i >= bz.len() {
            return false;
        }
        in_t[i] = true;
    }
    let outside: Vec<f64> = (0..bz.len()).filter(|&i| !in_t[i]).map(|i| bz[i]).collect();
    let pick = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| bz[i]).collect() };
    let q = crate::solvers::lp_quasinorm;
    let (lhs, rhs, strict) = match mode {
        ConditionMode::Strong | ConditionMode::Sectional => (q(&pick(&w.support), p), q(&outside, p), true),
        _ => {
            let Some(pat) = pattern else { return false };
            let (minus, plus) = partition_support(b, &w.z, pat);
            let lhs = q(&pick(&minus), p);
            if p == 1.0 {
                (lhs, q(&outside, 1.0) + q(&pick(&plus), 1.0), true)
            } else if p == 0.0 {
                (lhs, q(&outside, 0.0), true)
            } else {
                let znorm = norm2(&w.z);
                let plus_zero = plus.iter().all(|&i| bz[i].abs() <= zero_cut(b, i, znorm));
                (lhs, q(&outside, p), plus_zero)
            }
        }
    };
    let tol = REL_TOL * (lhs.abs() + rhs.abs());
    if strict {
        lhs >= rhs - tol
    } else {
        lhs > rhs + tol
    }
}
