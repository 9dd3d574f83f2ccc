//! Limiting thresholds as the undersampling ratio approaches one.
//!
//! The strong threshold is `rho*(p) = 1 - F(z*)`, where `z*` splits `E|X|^p`
//! into two equal halves. The weak and sectional limits are constants.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{
    abs_moment, half_normal_pdf, half_normal_sf, lower_log_moment, lower_partial_moment,
    upper_log_moment, upper_partial_moment, QuadratureConfig,
};

/// The strong threshold at one exponent, with the root-finder's diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitThreshold {
    pub p: f64,
    pub z_star: f64,
    pub rho_star: f64,
    /// `d rho* / dp`.
    pub derivative: f64,
    pub solver_iters: usize,
    /// `|int_0^{z*} x^p f - int_{z*}^inf x^p f|` at the returned root.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
struct Root {
    z: f64,
    iterations: usize,
    residual: f64,
}

fn check_strong_exponent(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!(
            "strong limit threshold needs p in (0, 1], got {p}"
        )));
    }
    Ok(())
}

fn find_z_star(p: f64, quad: &QuadratureConfig) -> Result<Root> {
    check_strong_exponent(p)?;
    let half = 0.5 * abs_moment(p, quad)?;
    let excess = |z: f64| -> Result<f64> { Ok(upper_partial_moment(z, p, quad)? - half) };

    let (mut lo, mut hi) = (0.0, quad.tail_cutoff_sigma);
    if !(excess(lo)? > 0.0 && excess(hi)? < 0.0) {
        return Err(Error::RootNotBracketed { lower: lo, upper: hi });
    }
    let mut iterations = 0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    // g'(z) = -z^p f(z)
    let mut z = 0.5 * (lo + hi);
    for _ in 0..3 {
        let r = excess(z)?;
        let slope = -z.powf(p) * half_normal_pdf(z);
        let step = r / slope;
        if !step.is_finite() {
            break;
        }
        z -= step;
        iterations += 1;
        if step.abs() < 1e-15 * z {
            break;
        }
    }
    let upper = upper_partial_moment(z, p, quad)?;
    let lower = lower_partial_moment(z, p, quad)?;
    Ok(Root {
        z,
        iterations,
        residual: (lower - upper).abs(),
    })
}

/// Solves `int_0^{z*} x^p f(x) dx = int_{z*}^inf x^p f(x) dx` for `z*`.
pub fn solve_z_star(p: f64, quad: &QuadratureConfig) -> Result<f64> {
    Ok(find_z_star(p, quad)?.z)
}

/// `d rho*/dp = [int_0^{z*} x^p ln x f - int_{z*}^inf x^p ln x f] / (2 z*^p)`.
pub fn strong_threshold_derivative(p: f64, quad: &QuadratureConfig) -> Result<f64> {
    let z = solve_z_star(p, quad)?;
    derivative_at(z, p, quad)
}

fn derivative_at(z: f64, p: f64, quad: &QuadratureConfig) -> Result<f64> {
    let below = lower_log_moment(z, p, quad)?;
    let above = upper_log_moment(z, p, quad)?;
    Ok((below - above) / (2.0 * z.powf(p)))
}

/// `rho*(p) = 1 - F(z*(p))` for `p` in `(0, 1]`.
pub fn strong_limit_threshold(p: f64, quad: &QuadratureConfig) -> Result<LimitThreshold> {
    let root = find_z_star(p, quad)?;
    Ok(LimitThreshold {
        p,
        z_star: root.z,
        rho_star: half_normal_sf(root.z),
        derivative: derivative_at(root.z, p, quad)?,
        solver_iters: root.iterations,
        residual: root.residual,
    })
}

fn check_closed_exponent(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Limiting weak threshold: 2/3 for `p < 1`, and 1 for `p = 1`.
pub fn weak_limit_threshold(p: f64) -> Result<f64> {
    check_closed_exponent(p)?;
    Ok(if p == 1.0 { 1.0 } else { 2.0 / 3.0 })
}

/// Limiting sectional threshold, 1/2 for every `p`.
pub fn sectional_limit_threshold(p: f64) -> Result<f64> {
    check_closed_exponent(p)?;
    Ok(0.5)
}

/// Value approached by `rho*(p)` as `p -> 0`.
pub const STRONG_LIMIT_AT_ZERO: f64 = 0.5;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_one_is_analytic() {
        let z = solve_z_star(1.0, &QuadratureConfig::default()).unwrap();
        assert!((z - (2.0 * std::f64::consts::LN_2).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn residual_is_small() {
        let r = strong_limit_threshold(0.37, &QuadratureConfig::default()).unwrap();
        assert!(r.residual <= 1e-10);
        assert_eq!(r.rho_star, half_normal_sf(r.z_star));
    }

    #[test]
    fn constants() {
        assert_eq!(weak_limit_threshold(0.0).unwrap(), 2.0 / 3.0);
        assert_eq!(weak_limit_threshold(1.0).unwrap(), 1.0);
        assert_eq!(sectional_limit_threshold(0.5).unwrap(), 0.5);
        assert!(weak_limit_threshold(1.5).is_err());
        assert!(strong_limit_threshold(0.0, &QuadratureConfig::default()).is_err());
    }
}
