//! Globally adaptive Gauss-Kronrod (7/15 point) integration on finite intervals.
//!
//! The error estimate follows the QUADPACK `qk15` heuristic. Interval
//! splitting always targets the panel with the largest error estimate until
//! the requested tolerance is met or the subdivision budget runs out.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and truncation rule shared by every semi-infinite integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Semi-infinite integrals are truncated this many standard deviations past
    /// the integrand's peak.
    pub tail_cutoff_sigma: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 1000,
            tail_cutoff_sigma: 12.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidArgument(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if !(self.tail_cutoff_sigma >= 8.0) {
            return Err(Error::InvalidArgument(
                "tail_cutoff_sigma must be at least 8".into(),
            ));
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lower: f64,
    upper: f64,
    value: f64,
    error: f64,
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, lower: f64, upper: f64) -> Panel {
    let center = 0.5 * (lower + upper);
    let half = 0.5 * (upper - lower);
    let abs_half = half.abs();

    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let abscissa = half * XGK[jtw];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let abscissa = half * XGK[jtwm1];
        let f1 = f(center - abscissa);
        let f2 = f(center + abscissa);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let res_kh = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - res_kh).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - res_kh).abs() + (fv2[j] - res_kh).abs());
    }

    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel {
        lower,
        upper,
        value,
        error,
    }
}

/// Integrates `f` over `[points[0], points[last]]`, starting from the panels
/// delimited by `points` (which must be non-decreasing).
pub fn integrate<F: Fn(f64) -> f64>(f: F, points: &[f64], cfg: &QuadratureConfig) -> Result<Integral> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(
            "integration needs at least two endpoints".into(),
        ));
    }
    if points.windows(2).any(|w| !(w[0] <= w[1])) || points.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "integration breakpoints must be finite and sorted: {points:?}"
        )));
    }

    let mut panels: Vec<Panel> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod_panel(&f, w[0], w[1]))
        .collect();
    let lower = points[0];
    let upper = points[points.len() - 1];
    if panels.is_empty() {
        return Ok(Integral {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
        });
    }

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature {
                lower,
                upper,
                estimate: value,
                error_estimate: error,
            });
        }
        if error <= cfg.abs_tol.max(cfg.rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                error_estimate: error,
                subdivisions: panels.len(),
            });
        }
        if panels.len() >= cfg.max_subdivisions {
            return Err(Error::Quadrature {
                lower,
                upper,
                estimate: value,
                error_estimate: error,
            });
        }

        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("panels is non-empty");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.lower + p.upper);
        if !(mid > p.lower && mid < p.upper) {
            // Panel collapsed to machine resolution; nothing left to refine.
            return Err(Error::Quadrature {
                lower,
                upper,
                estimate: value,
                error_estimate: error,
            });
        }
        panels.push(kronrod_panel(&f, p.lower, mid));
        panels.push(kronrod_panel(&f, mid, p.upper));
    }
}
