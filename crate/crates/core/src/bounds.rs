//! Finite-undersampling bounds on recovery thresholds.
//!
//! Every quantity here is the boundary of a Chernoff-exponent feasibility
//! region: a union bound over a `gamma`-net of the unit sphere contributes
//! `(1 - alpha) ln(1 + 2/gamma)` nats per dimension, and a large-deviation
//! estimate for sums of `|X|^p` must beat it.
//!
//! * `lambda_max(alpha, p)` and `lambda_min(alpha, p)` bracket `||Bz||_p^p / n`
//!   over unit `z` with overwhelming probability.
//! * [`strong_bound`] turns them into a sparsity ratio below which every sparse
//!   vector is recovered.
//! * [`weak_bound`] does the same for one fixed support and sign pattern, using
//!   the sign-mismatch MGF and `lambda_tilde_max`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{
    abs_moment_closed_form, log_mgf_indicator, log_mgf_pos, mgf_neg, mgf_neg_upper_bound,
    tilted_moments, QuadratureConfig, TiltedMoments,
};
use crate::optimize::{bisect_predicate, bracket_from_zero, golden_section};

/// Grids and tolerances for the nested exponent searches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentSearchConfig {
    /// Net radii, ascending in `(0, 1)`.
    pub gamma_grid: Vec<f64>,
    /// `epsilon = fraction * alpha` for each fraction in `(0, 1]`.
    pub epsilon_fractions: Vec<f64>,
    /// First trial point when bracketing the tilt `t`.
    pub t_start: f64,
    /// Bracketing gives up past this tilt.
    pub t_max: f64,
    pub t_tol: f64,
    /// Absolute tolerance of the bisections on `a`, `a_tilde` and `rho`.
    pub a_tol: f64,
    /// Largest `a` tried before a net radius is declared infeasible.
    pub a_cap: f64,
    /// Smallest sparsity ratio probed by the strong bound.
    pub rho_floor: f64,
    /// Relative slack allowed when checking the weak-bound monotonicity assumptions.
    pub monotonicity_tol: f64,
    pub quadrature: QuadratureConfig,
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_spaced(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

impl Default for ExponentSearchConfig {
    fn default() -> Self {
        Self::with_grid_sizes(60, 20)
    }
}

impl ExponentSearchConfig {
    /// Default tolerances with `gammas` log-spaced radii in `[1e-6, 0.9]` and
    /// `epsilons` evenly spaced fractions `1/epsilons, ..., 1`.
    pub fn with_grid_sizes(gammas: usize, epsilons: usize) -> Self {
        Self {
            gamma_grid: log_spaced(gammas, 1e-6, 0.9),
            epsilon_fractions: (1..=epsilons).map(|j| j as f64 / epsilons as f64).collect(),
            t_start: 1e-8,
            t_max: 1e12,
            t_tol: 1e-10,
            a_tol: 1e-6,
            a_cap: 1e6,
            rho_floor: 1e-7,
            monotonicity_tol: 5e-3,
            quadrature: QuadratureConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        if self.gamma_grid.is_empty() || self.gamma_grid.iter().any(|&g| !(g > 0.0 && g < 1.0)) {
            return Err(Error::InvalidArgument("gamma grid must be non-empty and inside (0, 1)".into()));
        }
        if self.gamma_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("gamma grid must be strictly ascending".into()));
        }
        if self.epsilon_fractions.is_empty()
            || self.epsilon_fractions.iter().any(|&e| !(e > 0.0 && e <= 1.0))
        {
            return Err(Error::InvalidArgument("epsilon fractions must lie in (0, 1]".into()));
        }
        let positive = [self.t_start, self.t_max, self.t_tol, self.a_tol, self.a_cap, self.rho_floor];
        if positive.iter().any(|&v| !(v > 0.0 && v.is_finite())) || self.monotonicity_tol < 0.0 {
            return Err(Error::InvalidArgument("search tolerances and limits must be positive".into()));
        }
        Ok(())
    }
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(rho: f64) -> f64 {
    if rho <= 0.0 || rho >= 1.0 {
        return 0.0;
    }
    -(rho * rho.log2() + (1.0 - rho) * (1.0 - rho).log2())
}

/// Optimum of a one-dimensional Chernoff problem `min_t (ln M(t) - a t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffOptimum {
    pub t_opt: f64,
    pub value: f64,
    /// `|d/dt ln M(t_opt) - a|`.
    pub stationarity_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tilt {
    /// `M(t) = E[e^{t|X|^p}]`.
    Plain,
    /// `M(t) = E[e^{t|X|^p S}]` with `S` an independent fair coin.
    Indicator,
}

impl Tilt {
    fn mean(self, p: f64) -> f64 {
        match self {
            Tilt::Plain => abs_moment_closed_form(p),
            Tilt::Indicator => 0.5 * abs_moment_closed_form(p),
        }
    }

    fn log_mgf(self, t: f64, p: f64, q: &QuadratureConfig) -> Result<f64> {
        match self {
            Tilt::Plain => log_mgf_pos(t, p, q),
            Tilt::Indicator => log_mgf_indicator(t, p, q),
        }
    }

    /// `ln M(t)` together with its first two derivatives.
    fn eval(self, t: f64, p: f64, q: &QuadratureConfig) -> Result<(f64, f64, f64)> {
        let m = tilted_moments(t, p, q)?;
        let (d1, d2) = self.cumulants(&m);
        let value = match self {
            Tilt::Plain => m.log_mgf,
            Tilt::Indicator => m.log_mgf + (-m.log_mgf).exp().ln_1p() - std::f64::consts::LN_2,
        };
        Ok((value, d1, d2))
    }

    /// First and second `t`-derivatives of `ln M`.
    fn derivatives(self, t: f64, p: f64, q: &QuadratureConfig) -> Result<(f64, f64)> {
        Ok(self.cumulants(&tilted_moments(t, p, q)?))
    }

    fn cumulants(self, m: &TiltedMoments) -> (f64, f64) {
        match self {
            Tilt::Plain => (m.mean, m.variance),
            Tilt::Indicator => {
                // Weight of the tilted branch: M/(M+1) for M = E[e^{t|X|^p}].
                let w = 1.0 / (1.0 + (-m.log_mgf).exp());
                let second = m.variance + m.mean * m.mean;
                (w * m.mean, w * second - w * w * m.mean * m.mean)
            }
        }
    }
}

fn chernoff(tilt: Tilt, a: f64, p: f64, cfg: &ExponentSearchConfig) -> Result<ChernoffOptimum> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1], got {p}")));
    }
    let floor = tilt.mean(p);
    if !(a > floor) {
        return Err(Error::Domain(format!(
            "Chernoff level {a} must exceed the mean {floor} for p = {p}"
        )));
    }
    let q = &cfg.quadrature;
    let objective = |t: f64| -> Result<f64> { Ok(tilt.log_mgf(t, p, q)? - a * t) };
    let (lo, hi) = bracket_from_zero(objective, cfg.t_start, cfg.t_max)?;
    let golden = golden_section(objective, lo, hi, cfg.t_tol)?;

    // Newton on the stationarity condition recovers the digits golden section cannot.
    let mut t = golden.x;
    let mut value = golden.value;
    let (mut slope, mut curvature) = tilt.derivatives(t, p, q)?;
    for _ in 0..8 {
        let residual = slope - a;
        if residual.abs() <= 1e-13 * a || !(curvature > 0.0) {
            break;
        }
        let next = t - residual / curvature;
        if !(next >= lo && next <= hi) {
            break;
        }
        let (s, c) = tilt.derivatives(next, p, q)?;
        if (s - a).abs() >= residual.abs() {
            break;
        }
        t = next;
        slope = s;
        curvature = c;
        value = objective(t)?;
    }
    Ok(ChernoffOptimum {
        t_opt: t,
        value: value.min(0.0),
        stationarity_residual: (slope - a).abs(),
    })
}

/// `min_{t>0} ln E[e^{t|X|^p}] - a t` for `a > E|X|^p`.
pub fn chernoff_upper_exponent(a: f64, p: f64, cfg: &ExponentSearchConfig) -> Result<ChernoffOptimum> {
    chernoff(Tilt::Plain, a, p, cfg)
}

/// `min_{t>0} ln E[e^{t|X|^p S}] - a_tilde t` for `a_tilde > E|X|^p / 2`.
pub fn chernoff_indicator_exponent(
    a_tilde: f64,
    p: f64,
    cfg: &ExponentSearchConfig,
) -> Result<ChernoffOptimum> {
    chernoff(Tilt::Indicator, a_tilde, p, cfg)
}

/// Net term `(1 - alpha) ln(1 + 2/gamma)`.
fn net_entropy(alpha: f64, gamma: f64) -> f64 {
    (1.0 - alpha) * (2.0 / gamma).ln_1p()
}

/// Winning net radius and level of a `lambda_max`-type search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaMax {
    pub value: f64,
    pub gamma: f64,
    /// The bisected level `a` (or `a_tilde`) at the winning radius.
    pub level: f64,
    /// The (negative) exponent certifying the winning level.
    pub exponent: f64,
}

/// Tilt `t` at which the rate `t ln M'(t) - ln M(t)` reaches `target`, if the
/// corresponding level stays below `a_cap`.
fn tilt_for_rate(tilt: Tilt, target: f64, p: f64, cfg: &ExponentSearchConfig) -> Result<Option<f64>> {
    let q = &cfg.quadrature;
    let rate = |t: f64| -> Result<(f64, f64, f64)> {
        let (value, d1, d2) = tilt.eval(t, p, q)?;
        Ok((t * d1 - value, t * d2, d1))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    loop {
        let (j, _, level) = rate(hi)?;
        if j >= target {
            break;
        }
        if level > cfg.a_cap || hi > cfg.t_max {
            return Ok(None);
        }
        lo = hi;
        hi *= 2.0;
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (j, dj, _) = rate(t)?;
        let miss = j - target;
        if miss.abs() <= 1e-13 * target.max(1.0) {
            break;
        }
        if miss > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let newton = t - miss / dj;
        t = if dj > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(Some(t))
}

/// Smallest level `a` with `net + weight * chernoff(a) < 0`, if below `a_cap`.
///
/// The minimum over `t` equals `-(t ln M'(t) - ln M(t))` at the tilt where
/// `ln M'(t) = a`, so the boundary level comes from one root solve in `t`;
/// the Chernoff solver then confirms it inside an `a_tol` bracket.
fn smallest_level(
    tilt: Tilt,
    net: f64,
    weight: f64,
    p: f64,
    cfg: &ExponentSearchConfig,
) -> Result<Option<(f64, f64)>> {
    let mean = tilt.mean(p);
    let exponent = |a: f64| -> Result<f64> {
        if a <= mean {
            return Ok(net);
        }
        Ok(net + weight * chernoff(tilt, a, p, cfg)?.value)
    };
    let Some(t) = tilt_for_rate(tilt, net / weight, p, cfg)? else {
        return Ok(None);
    };
    let guess = tilt.derivatives(t, p, &cfg.quadrature)?.0;
    let mut step = 0.5 * cfg.a_tol;
    let mut hi = guess + step;
    while exponent(hi)? >= 0.0 {
        hi += step;
        step *= 2.0;
        if hi > cfg.a_cap {
            return Ok(None);
        }
    }
    let mut step = 0.5 * cfg.a_tol;
    let mut lo = (hi - 2.0 * step).max(mean);
    while exponent(lo)? < 0.0 {
        hi = lo;
        step *= 2.0;
        lo = (lo - step).max(mean);
    }
    let (_, hi) = bisect_predicate(|a| Ok(exponent(a)? >= 0.0), lo, hi, cfg.a_tol)?;
    Ok(Some((hi, exponent(hi)?)))
}

fn lambda_max_search(
    tilt: Tilt,
    alpha: f64,
    p: f64,
    weight: f64,
    cfg: &ExponentSearchConfig,
) -> Result<LambdaMax> {
    let per_gamma: Vec<Option<LambdaMax>> = cfg
        .gamma_grid
        .par_iter()
        .map(|&gamma| {
            Ok(smallest_level(tilt, net_entropy(alpha, gamma), weight, p, cfg)?.map(|(level, exponent)| {
                LambdaMax {
                    value: level / (1.0 - gamma.powf(p)),
                    gamma,
                    level,
                    exponent,
                }
            }))
        })
        .collect::<Result<_>>()?;
    per_gamma
        .into_iter()
        .flatten()
        .reduce(|best, c| if c.value < best.value { c } else { best })
        .ok_or_else(|| {
            Error::Unbounded(format!(
                "no net radius admits a level below {} (alpha = {alpha}, p = {p})",
                cfg.a_cap
            ))
        })
}

fn check_alpha_p(alpha: f64, p: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("p must lie in (0, 1], got {p}")));
    }
    Ok(())
}

/// `lambda_max(alpha, p) = min_gamma a(alpha, p, gamma) / (1 - gamma^p)`.
pub fn compute_lambda_max(alpha: f64, p: f64, cfg: &ExponentSearchConfig) -> Result<LambdaMax> {
    check_alpha_p(alpha, p)?;
    lambda_max_search(Tilt::Plain, alpha, p, 1.0, cfg)
}

/// `lambda_tilde_max(alpha, p, rho) = min_gamma a_tilde(alpha, p, rho, gamma) / (1 - gamma^p)`.
pub fn compute_lambda_tilde_max(
    alpha: f64,
    p: f64,
    rho: f64,
    cfg: &ExponentSearchConfig,
) -> Result<LambdaMax> {
    check_alpha_p(alpha, p)?;
    if !(rho > 0.0 && rho < alpha) {
        return Err(Error::Domain(format!("rho must lie in (0, alpha), got {rho}")));
    }
    lambda_max_search(Tilt::Indicator, alpha, p, rho, cfg)
}

/// Winning parameters of the `lambda_min` search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaMin {
    pub value: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub exponent: f64,
    pub lambda_max: LambdaMax,
}

/// `lambda_min` given an already computed `lambda_max`.
pub fn lambda_min_from(
    alpha: f64,
    p: f64,
    lambda_max: LambdaMax,
    cfg: &ExponentSearchConfig,
) -> Result<LambdaMin> {
    check_alpha_p(alpha, p)?;
    let mut best: Option<LambdaMin> = None;
    for &gamma in &cfg.gamma_grid {
        let net = net_entropy(alpha, gamma);
        let gp = gamma.powf(p);
        for &frac in &cfg.epsilon_fractions {
            let epsilon = frac * alpha;
            let s = 1.0 - alpha + epsilon;
            let b = gamma.powf(p * s);
            let value = b - gp * lambda_max.value;
            if value <= 0.0 || best.is_some_and(|bst| value <= bst.value) {
                continue;
            }
            let t = 1.0 / b;
            let mut exponent = net + mgf_neg_upper_bound(t, p).ln() + 1.0;
            if exponent >= 0.0 {
                exponent = net + mgf_neg(t, p, &cfg.quadrature)?.ln() + 1.0;
            }
            if exponent < 0.0 {
                best = Some(LambdaMin {
                    value,
                    gamma,
                    epsilon,
                    exponent,
                    lambda_max,
                });
            }
        }
    }
    best.ok_or_else(|| {
        Error::Infeasible(format!(
            "no (gamma, epsilon) pair gives a positive lambda_min (alpha = {alpha}, p = {p})"
        ))
    })
}

/// `lambda_min(alpha, p) = max_{gamma, epsilon} gamma^{p(1-alpha+epsilon)} - gamma^p lambda_max(alpha, p)`
/// over the pairs whose lower-tail exponent is negative.
pub fn compute_lambda_min(alpha: f64, p: f64, cfg: &ExponentSearchConfig) -> Result<LambdaMin> {
    let lambda_max = compute_lambda_max(alpha, p, cfg)?;
    lambda_min_from(alpha, p, lambda_max, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Strong,
    Weak,
}

/// A finite-`alpha` threshold bound and everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub alpha: f64,
    pub p: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub rho_bound: f64,
    /// Radius attaining the sparsity bound (strong) or `lambda_tilde_max` (weak).
    pub winning_gamma: f64,
    /// Epsilon attaining `lambda_min`.
    pub winning_epsilon: f64,
    /// Largest of the exponents that justify the bound; negative.
    pub exponent_margin: f64,
    /// Undersampling ratio `(alpha - rho) / (1 - rho)` at which the weak bound
    /// evaluates `lambda_max` and `lambda_min`.
    pub effective_alpha: Option<f64>,
    pub lambda_tilde_max: Option<f64>,
    pub lambda_max_detail: LambdaMax,
    pub lambda_min_detail: LambdaMin,
    pub config: ExponentSearchConfig,
}

fn strong_exponent(rho: f64, net: f64, c: f64, p: f64, cfg: &ExponentSearchConfig) -> Result<f64> {
    Ok(binary_entropy(rho) * std::f64::consts::LN_2 + net + rho * chernoff_upper_exponent(c / rho, p, cfg)?.value)
}

/// Largest `rho` certified at one net radius, with its exponent.
fn strong_rho_at(gamma: f64, alpha: f64, p: f64, lambda_min: f64, cfg: &ExponentSearchConfig) -> Result<Option<(f64, f64)>> {
    let net = net_entropy(alpha, gamma);
    let c = 0.5 * lambda_min * (1.0 - gamma.powf(p));
    let hi = (c / abs_moment_closed_form(p)).min(0.5) * (1.0 - 1e-9);
    if hi <= cfg.rho_floor {
        return Ok(None);
    }
    if strong_exponent(hi, net, c, p, cfg)? < 0.0 {
        return Ok(Some((hi, strong_exponent(hi, net, c, p, cfg)?)));
    }
    // Halve downwards from the cap so the extreme tilts of tiny rho are only
    // reached when nothing larger is feasible.
    let mut upper = hi;
    let mut lower = 0.5 * hi;
    loop {
        if lower < cfg.rho_floor {
            return Ok(None);
        }
        match strong_exponent(lower, net, c, p, cfg) {
            Ok(e) if e < 0.0 => break,
            Ok(_) => {}
            Err(Error::Unbounded(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
        upper = lower;
        lower *= 0.5;
    }
    let rho = bisect_predicate(|r| Ok(strong_exponent(r, net, c, p, cfg)? < 0.0), lower, upper, cfg.a_tol)?.0;
    Ok(Some((rho, strong_exponent(rho, net, c, p, cfg)?)))
}

/// Sparsity ratio below which a Gaussian `alpha n x n` matrix recovers every
/// `rho n`-sparse vector by lp-minimization with overwhelming probability.
pub fn strong_bound(alpha: f64, p: f64, cfg: &ExponentSearchConfig) -> Result<BoundResult> {
    check_alpha_p(alpha, p)?;
    cfg.validate()?;
    let lambda_min = compute_lambda_min(alpha, p, cfg)?;
    let per_gamma: Vec<Option<(f64, f64, f64)>> = cfg
        .gamma_grid
        .par_iter()
        .map(|&g| Ok(strong_rho_at(g, alpha, p, lambda_min.value, cfg)?.map(|(r, e)| (g, r, e))))
        .collect::<Result<_>>()?;
    let (gamma, rho, exponent) = per_gamma
        .into_iter()
        .flatten()
        .reduce(|best, c| if c.1 > best.1 { c } else { best })
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "no net radius certifies a sparsity ratio above {} (alpha = {alpha}, p = {p})",
                cfg.rho_floor
            ))
        })?;
    let lambda_max = lambda_min.lambda_max;
    Ok(BoundResult {
        kind: BoundKind::Strong,
        alpha,
        p,
        lambda_max: lambda_max.value,
        lambda_min: lambda_min.value,
        rho_bound: rho,
        winning_gamma: gamma,
        winning_epsilon: lambda_min.epsilon,
        exponent_margin: exponent.max(lambda_min.exponent).max(lambda_max.exponent),
        effective_alpha: None,
        lambda_tilde_max: None,
        lambda_max_detail: lambda_max,
        lambda_min_detail: lambda_min,
        config: cfg.clone(),
    })
}

/// One evaluation of the weak-bound inequality.
#[derive(Debug, Clone, Copy)]
struct WeakProbe {
    rho: f64,
    lambda_tilde: Option<LambdaMax>,
    lambda_min: Option<LambdaMin>,
}

impl WeakProbe {
    fn satisfied(&self) -> bool {
        match (self.lambda_tilde, self.lambda_min) {
            (Some(lt), Some(lm)) => self.rho * lt.value <= (1.0 - self.rho) * lm.value,
            _ => false,
        }
    }
}

/// Searches that run out of feasible parameters count as "inequality not met".
fn feasible<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Infeasible(_) | Error::Unbounded(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn weak_probe(rho: f64, alpha: f64, p: f64, cfg: &ExponentSearchConfig) -> Result<WeakProbe> {
    let lambda_tilde = feasible(compute_lambda_tilde_max(alpha, p, rho, cfg))?;
    let effective = (alpha - rho) / (1.0 - rho);
    let lambda_min = feasible(compute_lambda_min(effective, p, cfg))?;
    Ok(WeakProbe {
        rho,
        lambda_tilde,
        lambda_min,
    })
}

/// Checks the shape the bisection relies on: as `rho` grows, `lambda_tilde_max`
/// does not increase, `rho * lambda_tilde_max` does not decrease, and
/// `lambda_min` at the effective ratio does not increase.
fn check_monotone(probes: &[WeakProbe], cfg: &ExponentSearchConfig) -> Result<()> {
    let tol = cfg.monotonicity_tol;
    let exceeds = |x: f64, y: f64| x > y * (1.0 + tol) + cfg.a_tol;
    for a in probes {
        for b in probes.iter().filter(|b| b.rho > a.rho) {
            if let (Some(la), Some(lb)) = (a.lambda_tilde, b.lambda_tilde) {
                if exceeds(lb.value, la.value) {
                    return Err(Error::Monotonicity(format!(
                        "lambda_tilde_max grows from {} at rho {} to {} at rho {}",
                        la.value, a.rho, lb.value, b.rho
                    )));
                }
                if exceeds(a.rho * la.value, b.rho * lb.value) {
                    return Err(Error::Monotonicity(format!(
                        "rho * lambda_tilde_max shrinks from {} at rho {} to {} at rho {}",
                        a.rho * la.value,
                        a.rho,
                        b.rho * lb.value,
                        b.rho
                    )));
                }
            }
            if let (Some(la), Some(lb)) = (a.lambda_min, b.lambda_min) {
                if exceeds(lb.value, la.value) {
                    return Err(Error::Monotonicity(format!(
                        "lambda_min grows from {} at rho {} to {} at rho {}",
                        la.value, a.rho, lb.value, b.rho
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Sparsity ratio below which a Gaussian `alpha n x n` matrix recovers every
/// vector on one fixed support and sign pattern with overwhelming probability.
pub fn weak_bound(alpha: f64, p: f64, cfg: &ExponentSearchConfig) -> Result<BoundResult> {
    check_alpha_p(alpha, p)?;
    cfg.validate()?;
    let mut probes: Vec<WeakProbe> = Vec::new();
    let mut best: Option<WeakProbe> = None;
    let (mut lo, mut hi) = (0.0, alpha);
    while hi - lo > cfg.a_tol {
        let mid = 0.5 * (lo + hi);
        let probe = weak_probe(mid, alpha, p, cfg)?;
        probes.push(probe);
        check_monotone(&probes, cfg)?;
        if probe.satisfied() {
            lo = mid;
            best = Some(probe);
        } else {
            hi = mid;
        }
    }
    let probe = best.ok_or_else(|| {
        Error::Infeasible(format!(
            "weak-bound inequality fails for every probed rho (alpha = {alpha}, p = {p})"
        ))
    })?;
    let (lt, lm) = (probe.lambda_tilde.expect("satisfied"), probe.lambda_min.expect("satisfied"));
    Ok(BoundResult {
        kind: BoundKind::Weak,
        alpha,
        p,
        lambda_max: lm.lambda_max.value,
        lambda_min: lm.value,
        rho_bound: probe.rho,
        winning_gamma: lt.gamma,
        winning_epsilon: lm.epsilon,
        exponent_margin: lt.exponent.max(lm.exponent).max(lm.lambda_max.exponent),
        effective_alpha: Some((alpha - probe.rho) / (1.0 - probe.rho)),
        lambda_tilde_max: Some(lt.value),
        lambda_max_detail: lm.lambda_max,
        lambda_min_detail: lm,
        config: cfg.clone(),
    })
}

/// Tests whether `rho` satisfies `rho lambda_tilde_max(alpha,p,rho) <= (1-rho) lambda_min(alpha',p)`.
pub fn weak_inequality_holds(rho: f64, alpha: f64, p: f64, cfg: &ExponentSearchConfig) -> Result<bool> {
    check_alpha_p(alpha, p)?;
    if !(rho > 0.0 && rho < alpha) {
        return Err(Error::Domain(format!("rho must lie in (0, alpha), got {rho}")));
    }
    Ok(weak_probe(rho, alpha, p, cfg)?.satisfied())
}
