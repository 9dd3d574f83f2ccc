//! One-dimensional search helpers.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimizer found by [`golden_section`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Finds `[lo, hi]` containing the minimizer of a unimodal `f` on `[0, inf)`
/// whose slope at zero is negative, by doubling from `start`.
pub fn bracket_from_zero<F>(mut f: F, start: f64, limit: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut before_prev = 0.0;
    let mut prev_x = 0.0;
    let mut prev = f(0.0)?;
    let mut x = start;
    loop {
        let fx = f(x)?;
        if fx >= prev {
            return Ok((before_prev, x));
        }
        if x > limit {
            return Err(Error::Unbounded(format!(
                "objective still decreasing at t = {x:e}"
            )));
        }
        before_prev = prev_x;
        prev_x = x;
        prev = fx;
        x *= 2.0;
    }
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol * (1 + |x|)`.
pub fn golden_section<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<Minimum>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evaluations = 2;
    while hi - lo > tol * (1.0 + 0.5 * (lo + hi).abs()) {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
        evaluations += 1;
        if evaluations > 10_000 {
            return Err(Error::IterationLimit(evaluations));
        }
    }
    let (x, value) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    Ok(Minimum {
        x,
        value,
        evaluations,
    })
}

/// Bisection for the boundary of a monotone predicate: `holds(lo)` is true,
/// `holds(hi)` is false; returns `(lo, hi)` with `hi - lo <= tol`.
pub fn bisect_predicate<F>(mut holds: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<bool>,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_quadratic_minimum() {
        let m = golden_section(|x| Ok((x - 1.3) * (x - 1.3) + 2.0), 0.0, 5.0, 1e-10).unwrap();
        assert!((m.x - 1.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bracket_contains_minimum() {
        let (lo, hi) = bracket_from_zero(|x| Ok((x - 37.0).powi(2)), 1e-8, 1e12).unwrap();
        assert!(lo < 37.0 && 37.0 < hi);
        let err = bracket_from_zero(|x| Ok(-x), 1e-8, 1e3).unwrap_err();
        assert!(matches!(err, Error::Unbounded(_)));
    }

    #[test]
    fn bisection_converges() {
        let (lo, hi) = bisect_predicate(|x| Ok(x * x < 2.0), 0.0, 2.0, 1e-12).unwrap();
        assert!(lo <= std::f64::consts::SQRT_2 && std::f64::consts::SQRT_2 <= hi);
        assert!(hi - lo <= 1e-12);
    }
}
