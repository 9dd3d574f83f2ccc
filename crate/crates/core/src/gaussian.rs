//! Scalar integrals of the standard normal distribution.
//!
//! Everything here is a function of `X ~ N(0,1)` through `|X|`, whose density
//! on the half line is `f(z) = sqrt(2/pi) exp(-z^2/2)`. The moment-generating
//! functions of `|X|^p` are the building blocks of every Chernoff exponent in
//! [`crate::bounds`].
//!
//! Semi-infinite integrals are truncated at `tail_cutoff_sigma` standard
//! deviations past the integrand's peak. Pieces of the half line below a split
//! point are integrated in `u = ln x`, which turns the `x^p` cusp at the origin
//! into an exponentially decaying tail.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

pub use crate::quadrature::QuadratureConfig;
use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// `sqrt(2/pi)`, the half-normal density at zero.
pub const SQRT_2_OVER_PI: f64 = FRAC_2_SQRT_PI / SQRT_2;

/// How far (in nats of the leading power law) the log-substituted piece extends
/// towards the origin before being dropped.
const LOG_TAIL_NATS: f64 = 45.0;

/// Density of `|X|`.
pub fn half_normal_pdf(z: f64) -> f64 {
    if z < 0.0 {
        0.0
    } else {
        SQRT_2_OVER_PI * (-0.5 * z * z).exp()
    }
}

/// Distribution function of `|X|`, `erf(z / sqrt 2)`.
pub fn half_normal_cdf(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else {
        libm::erf(z / SQRT_2)
    }
}

/// Survival function `1 - F(z)`, computed without cancellation.
pub fn half_normal_sf(z: f64) -> f64 {
    if z <= 0.0 {
        1.0
    } else {
        libm::erfc(z / SQRT_2)
    }
}

/// `E|X|^p` from the gamma-function closed form `2^{p/2} Gamma((p+1)/2) / sqrt(pi)`.
pub fn abs_moment_closed_form(p: f64) -> f64 {
    (0.5 * p * std::f64::consts::LN_2 + libm::lgamma(0.5 * (p + 1.0))).exp() / PI.sqrt()
}

/// Integrates `h` over `[from, upper]`, using `x = e^u` on the part below `split`.
///
/// `leading_power` is the exponent `q > -1` with `h(x) ~ x^q` near the origin;
/// it decides how far into `u < 0` the substituted piece must reach.
fn half_line_integral<H: Fn(f64) -> f64>(
    h: H,
    from: f64,
    upper: f64,
    split: f64,
    leading_power: f64,
    breakpoints: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let mut total = 0.0;
    let log_split = split.ln();
    if from < split {
        let u_floor = log_split - LOG_TAIL_NATS / (1.0 + leading_power);
        let u_from = if from > 0.0 { from.ln().max(u_floor) } else { u_floor };
        let mut pts = vec![u_from];
        pts.extend(
            breakpoints
                .iter()
                .filter(|&&b| b > 0.0 && b < split)
                .map(|b| b.ln())
                .filter(|&u| u > u_from),
        );
        pts.push(log_split);
        total += integrate(
            |u: f64| {
                let x = u.exp();
                h(x) * x
            },
            &pts,
            cfg,
        )?
        .value;
    }
    let start = from.max(split);
    if upper > start {
        let mut pts = vec![start];
        pts.extend(breakpoints.iter().copied().filter(|&b| b > start && b < upper));
        pts.push(upper);
        total += integrate(&h, &pts, cfg)?.value;
    }
    Ok(total)
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Domain(format!("exponent p must be positive, got {p}")));
    }
    Ok(())
}

fn check_tilt_exponent(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("exponent p must lie in (0, 1], got {p}")));
    }
    Ok(())
}

/// `mu(p) = E|X|^p` by quadrature.
pub fn abs_moment(p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    upper_partial_moment(0.0, p, cfg)
}

/// `g(z) = int_z^inf x^p f(x) dx`, the part of `E|X|^p` carried by `|X| > z`.
pub fn upper_partial_moment(z: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_exponent(p)?;
    let z = z.max(0.0);
    let peak = p.sqrt();
    let upper = z.max(peak) + cfg.tail_cutoff_sigma;
    half_line_integral(
        |x: f64| x.powf(p) * half_normal_pdf(x),
        z,
        upper,
        1.0,
        p,
        &[peak],
        cfg,
    )
}

/// `int_0^z x^p f(x) dx`.
pub fn lower_partial_moment(z: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_exponent(p)?;
    if z <= 0.0 {
        return Ok(0.0);
    }
    half_line_integral(
        |x: f64| x.powf(p) * half_normal_pdf(x),
        0.0,
        z,
        1.0_f64.min(z),
        p,
        &[],
        cfg,
    )
}

/// Log-moments of `|X|^p` under the exponential tilt `e^{t|X|^p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedMoments {
    /// `ln E[e^{t|X|^p}]`.
    pub log_mgf: f64,
    /// First derivative in `t` of `log_mgf`: the tilted mean of `|X|^p`.
    pub mean: f64,
    /// Second derivative in `t` of `log_mgf`: the tilted variance of `|X|^p`.
    pub variance: f64,
}

/// Evaluates `int_0^inf x^{kp} e^{t x^p - x^2/2} dx` for `k = 0..moments`, each
/// divided by `e^{shift}`; returns `(shift, integrals)`.
///
/// For large tilts the integrand is re-expressed around its peak
/// `x0 = (tp)^{1/(2-p)}` as `x = x0 (1 + u)`, which keeps the exponent free
/// of cancellation.
fn positive_tilt_integrals(
    t: f64,
    p: f64,
    moments: usize,
    cfg: &QuadratureConfig,
) -> Result<(f64, Vec<f64>)> {
    let x0 = if t > 0.0 { (t * p).powf(1.0 / (2.0 - p)) } else { 0.0 };
    let cutoff = cfg.tail_cutoff_sigma;
    let mut out = Vec::with_capacity(moments);
    if x0 < 4.0 {
        let shift = t * x0.powf(p) - 0.5 * x0 * x0;
        let upper = x0 + cutoff;
        for k in 0..moments {
            let kp = k as f64 * p;
            let v = half_line_integral(
                |x: f64| {
                    let xp = x.powf(p);
                    xp.powi(k as i32) * (t * xp - 0.5 * x * x - shift).exp()
                },
                0.0,
                upper,
                1.0,
                kp,
                &[x0],
                cfg,
            )?;
            out.push(v);
        }
        Ok((shift, out))
    } else {
        let scale = x0 * x0;
        let shift = scale * (1.0 / p - 0.5);
        let width = cutoff / x0;
        let lo = (-width).max(-1.0);
        for k in 0..moments {
            let kp = k as f64 * p;
            let phi = |u: f64| {
                let bump = (p * u.ln_1p()).exp_m1() / p - u - 0.5 * u * u;
                let w = if k == 0 { 1.0 } else { (kp * u.ln_1p()).exp() };
                w * (scale * bump).exp()
            };
            let v = integrate(phi, &[lo, 0.0, width], cfg)?.value;
            out.push(v * x0 * x0.powf(kp));
        }
        Ok((shift, out))
    }
}

/// `ln E[e^{t|X|^p}]`; finite for every `t >= 0` when `p < 2`.
pub fn log_mgf_pos(t: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_tilt_exponent(p)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("tilt t must be finite and >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let (shift, ints) = positive_tilt_integrals(t, p, 1, cfg)?;
    Ok(shift + (SQRT_2_OVER_PI * ints[0]).ln())
}

/// `E[e^{t|X|^p}]`.
pub fn mgf_pos(t: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(log_mgf_pos(t, p, cfg)?.exp())
}

/// Log-MGF together with its first two `t`-derivatives.
pub fn tilted_moments(t: f64, p: f64, cfg: &QuadratureConfig) -> Result<TiltedMoments> {
    check_tilt_exponent(p)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("tilt t must be finite and >= 0, got {t}")));
    }
    let (shift, ints) = positive_tilt_integrals(t, p, 3, cfg)?;
    let mean = ints[1] / ints[0];
    let second = ints[2] / ints[0];
    Ok(TiltedMoments {
        log_mgf: shift + (SQRT_2_OVER_PI * ints[0]).ln(),
        mean,
        variance: (second - mean * mean).max(0.0),
    })
}

/// `E[e^{t|X|^p S}]` with `S = 1{X < 0}` independent of `|X|`: `(mgf_pos + 1) / 2`.
pub fn mgf_indicator(t: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(0.5 * mgf_pos(t, p, cfg)? + 0.5)
}

/// `ln E[e^{t|X|^p S}]`, evaluated without overflow for large tilts.
pub fn log_mgf_indicator(t: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let l = log_mgf_pos(t, p, cfg)?;
    Ok(l + (-l).exp().ln_1p() - std::f64::consts::LN_2)
}

/// `E[e^{-t|X|^p}]` for `t >= 0`.
pub fn mgf_neg(t: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_tilt_exponent(p)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("tilt t must be finite and >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    // In u = ln x the integrand is exp(u - t e^{pu} - e^{2u}/2), a single smooth bump.
    let log_integrand = |u: f64| u - t * (p * u).exp() - 0.5 * (2.0 * u).exp();
    let slope = |u: f64| 1.0 - t * p * (p * u).exp() - (2.0 * u).exp();
    let u_hi = cfg.tail_cutoff_sigma.ln();
    let u_lo = (-t.ln() / p).min(0.0) - LOG_TAIL_NATS;
    // The slope is strictly decreasing, so the peak is found by bisection.
    let (mut a, mut b) = (u_lo, u_hi);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if slope(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-9 {
            break;
        }
    }
    let peak = 0.5 * (a + b);
    let top = log_integrand(peak);
    let v = integrate(|u: f64| (log_integrand(u) - top).exp(), &[u_lo, peak, u_hi], cfg)?.value;
    Ok(SQRT_2_OVER_PI * v * top.exp())
}

/// Upper bound `t^{-1/p} sqrt(2/pi) Gamma(1/p) / p` on `E[e^{-t|X|^p}]`.
pub fn mgf_neg_upper_bound(t: f64, p: f64) -> f64 {
    (-(t.ln()) / p + SQRT_2_OVER_PI.ln() + libm::lgamma(1.0 / p) - p.ln()).exp()
}

/// Lower bound `t^{-1/p} sqrt(2/pi) int_0^inf e^{-y^p - y^2/2} dy` on
/// `E[e^{-t|X|^p}]`, valid for `t > 1`.
pub fn mgf_neg_lower_bound(t: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(t > 1.0) {
        return Err(Error::Domain(format!("lower bound needs t > 1, got {t}")));
    }
    Ok(t.powf(-1.0 / p) * mgf_neg(1.0, p, cfg)?)
}

/// `int_0^z x^p ln(x) f(x) dx`, with `[0, 1e-3]` integrated in `u = ln x`.
pub fn lower_log_moment(z: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_exponent(p)?;
    if z <= 0.0 {
        return Ok(0.0);
    }
    half_line_integral(
        |x: f64| x.powf(p) * x.ln() * half_normal_pdf(x),
        0.0,
        z,
        1e-3_f64.min(z),
        p,
        &[],
        cfg,
    )
}

/// `int_z^inf x^p ln(x) f(x) dx`.
pub fn upper_log_moment(z: f64, p: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_exponent(p)?;
    let z = z.max(0.0);
    let upper = z.max(p.sqrt()) + cfg.tail_cutoff_sigma;
    let mut pts = vec![];
    if z < 1.0 {
        pts.push(1.0);
    }
    half_line_integral(
        |x: f64| x.powf(p) * x.ln() * half_normal_pdf(x),
        z,
        upper,
        1e-3,
        p,
        &pts,
        cfg,
    )
}
