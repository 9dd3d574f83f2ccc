//! Finite-alpha bound chain checked against brute-force grid oracles that share
//! no code with the library: closed-form p = 1 MGFs via statrs, and Simpson-rule
//! MGFs for other exponents.

use lp_recovery::bounds::*;
use lp_recovery::gaussian::abs_moment_closed_form;
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// `ln E[e^{t|X|}] = t^2/2 + ln(2 Phi(t))`.
fn log_mgf_p1(t: f64) -> f64 {
    0.5 * t * t + (erfc(-t / std::f64::consts::SQRT_2)).ln()
}

/// `ln E[e^{t|X|^p}]` by composite Simpson on `x = e^u`, computed in log space.
fn log_mgf_simpson(t: f64, p: f64) -> f64 {
    let (u0, u1, n) = (-40.0f64, 4.5f64, 20_000usize);
    let h = (u1 - u0) / n as f64;
    let expo = |u: f64| {
        let x = u.exp();
        t * x.powf(p) - 0.5 * x * x + u
    };
    let vals: Vec<f64> = (0..=n).map(|i| expo(u0 + h * i as f64)).collect();
    let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for (i, v) in vals.iter().enumerate() {
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * (v - top).exp();
    }
    top + (s * h / 3.0 * SQRT_2_OVER_PI).ln()
}

fn log_mgf_neg_simpson(t: f64, p: f64) -> f64 {
    let (u0, u1, n) = (-60.0f64, 4.5f64, 40_000usize);
    let h = (u1 - u0) / n as f64;
    let expo = |u: f64| {
        let x = u.exp();
        -t * x.powf(p) - 0.5 * x * x + u
    };
    let vals: Vec<f64> = (0..=n).map(|i| expo(u0 + h * i as f64)).collect();
    let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut s = 0.0;
    for (i, v) in vals.iter().enumerate() {
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * (v - top).exp();
    }
    top + (s * h / 3.0 * SQRT_2_OVER_PI).ln()
}

fn indicator(log_m: f64) -> f64 {
    log_m + (-log_m).exp().ln_1p() - std::f64::consts::LN_2
}

/// `min over a fine t grid of lm(t) - a t`, refined by a local grid around the best point.
fn grid_min(lm: &dyn Fn(f64) -> f64, a: f64, t_hi: f64) -> f64 {
    let n = 200_000;
    let h = t_hi / n as f64;
    let mut best = (0.0, 0.0);
    for i in 1..=n {
        let t = h * i as f64;
        let v = lm(t) - a * t;
        if v < best.1 {
            best = (t, v);
        }
    }
    let mut v = best.1;
    for j in -100..=100 {
        let t = best.0 + h * j as f64 / 100.0;
        if t > 0.0 {
            v = v.min(lm(t) - a * t);
        }
    }
    v
}

fn cfg() -> ExponentSearchConfig {
    ExponentSearchConfig::default()
}

#[test]
fn chernoff_at_the_mean_is_zero() {
    for &p in &[0.3, 1.0] {
        let mu = abs_moment_closed_form(p);
        let r = chernoff_upper_exponent(mu * (1.0 + 1e-9), p, &cfg()).unwrap();
        assert!(r.value.abs() < 1e-12 && r.t_opt < 1e-6, "{r:?}");
        let r = chernoff_indicator_exponent(0.5 * mu * (1.0 + 1e-9), p, &cfg()).unwrap();
        assert!(r.value.abs() < 1e-12 && r.t_opt < 1e-6, "{r:?}");
    }
}

#[test]
fn chernoff_matches_dense_grid_for_p1() {
    let r = chernoff_upper_exponent(2.0, 1.0, &cfg()).unwrap();
    let oracle = grid_min(&log_mgf_p1, 2.0, 20.0);
    assert!(r.value < 0.0);
    assert!((r.value - oracle).abs() < 1e-6, "{} vs {oracle}", r.value);

    let r = chernoff_indicator_exponent(1.0, 1.0, &cfg()).unwrap();
    let oracle = grid_min(&|t| indicator(log_mgf_p1(t)), 1.0, 20.0);
    assert!((r.value - oracle).abs() < 1e-6, "{} vs {oracle}", r.value);
}

#[test]
fn chernoff_matches_simpson_for_p_half() {
    let r = chernoff_upper_exponent(1.5, 0.5, &cfg()).unwrap();
    let oracle = grid_min(&|t| log_mgf_simpson(t, 0.5), 1.5, 20.0);
    assert!((r.value - oracle).abs() < 1e-6, "{} vs {oracle}", r.value);
}

#[test]
fn chernoff_optimum_is_stationary_and_convex() {
    let c = cfg();
    for &p in &[0.2, 0.5, 1.0] {
        let mu = abs_moment_closed_form(p);
        // Levels far above the mean push the optimal tilt towards t_max for small p.
        let mults: &[f64] = if p < 0.5 { &[1.01, 1.5, 3.0, 10.0] } else { &[1.01, 1.5, 3.0, 10.0, 100.0] };
        for &mult in mults {
            for indicator_tilt in [false, true] {
                let a = if indicator_tilt { 0.5 * mu * mult } else { mu * mult };
                let r = if indicator_tilt {
                    chernoff_indicator_exponent(a, p, &c).unwrap()
                } else {
                    chernoff_upper_exponent(a, p, &c).unwrap()
                };
                assert!(r.stationarity_residual <= 1e-8 * a.max(1.0), "p={p} a={a}: {r:?}");
                assert!(r.t_opt > 0.0 && r.value < 0.0);
            }
        }
    }
}

#[test]
fn chernoff_value_decreases_in_level() {
    let c = cfg();
    let mut prev = 0.0;
    for i in 1..30 {
        let a = 0.8 + 0.1 * i as f64;
        let v = chernoff_upper_exponent(a, 1.0, &c).unwrap().value;
        assert!(v < prev);
        prev = v;
    }
}

#[test]
fn lambda_max_matches_brute_force_oracle() {
    // 200 net radii x 2000 levels, rate function from the closed-form p = 1 MGF.
    let alpha = 0.5;
    let mu = abs_moment_closed_form(1.0);
    let levels: Vec<f64> = (1..=2000).map(|j| mu + (4.0 - mu) * j as f64 / 2000.0).collect();
    let t_grid: Vec<f64> = (1..=6000).map(|i| 0.002 * i as f64).collect();
    let lm: Vec<f64> = t_grid.iter().map(|&t| log_mgf_p1(t)).collect();
    let rates: Vec<f64> = levels
        .iter()
        .map(|&a| t_grid.iter().zip(&lm).map(|(&t, &l)| a * t - l).fold(0.0, f64::max))
        .collect();
    let mut oracle = f64::INFINITY;
    for g in log_spaced(200, 1e-6, 0.9) {
        let net = (1.0 - alpha) * (2.0 / g).ln_1p();
        if let Some(j) = rates.iter().position(|&r| r > net) {
            oracle = oracle.min(levels[j] / (1.0 - g));
        }
    }
    let ours = compute_lambda_max(alpha, 1.0, &cfg()).unwrap();
    assert!(ours.value > mu);
    assert!(ours.exponent < 0.0);
    // Level spacing is 1.6e-3; the two radius grids differ.
    assert!((ours.value - oracle).abs() < 5e-3, "{} vs {oracle}", ours.value);
    assert!((ours.value - 2.330_008_1).abs() < 1e-5, "regression: {}", ours.value);
}

#[test]
fn lambda_max_exceeds_moment_and_decreases_in_alpha() {
    let c = ExponentSearchConfig::with_grid_sizes(20, 5);
    for &p in &[0.25, 0.5, 1.0] {
        let mut prev = f64::INFINITY;
        for &alpha in &[0.3, 0.5, 0.7, 0.9, 0.99] {
            let l = compute_lambda_max(alpha, p, &c).unwrap().value;
            assert!(l > abs_moment_closed_form(p));
            assert!(l <= prev + 1e-6, "p={p} alpha={alpha}");
            prev = l;
        }
    }
}

#[test]
fn lambda_min_matches_dense_grid_oracle() {
    let (alpha, p) = (0.9, 0.5);
    let ours = compute_lambda_min(alpha, p, &cfg()).unwrap();
    let lmax = ours.lambda_max.value;
    let const_bound = (SQRT_2_OVER_PI).ln() + ln_gamma(1.0 / p) - p.ln();
    let brute = |gammas: Vec<f64>, eps_points: usize| {
        let mut best: f64 = 0.0;
        for g in gammas {
            let net = (1.0 - alpha) * (2.0 / g).ln_1p();
            for j in 1..=eps_points {
                let eps = alpha * j as f64 / eps_points as f64;
                let b = g.powf(p * (1.0 - alpha + eps));
                let value = b - g.powf(p) * lmax;
                if value <= best {
                    continue;
                }
                let t = 1.0 / b;
                let feasible = net - t.ln() / p + const_bound + 1.0 < 0.0
                    || net + log_mgf_neg_simpson(t, p) + 1.0 < 0.0;
                if feasible {
                    best = value;
                }
            }
        }
        best
    };
    let same_grid = brute(log_spaced(60, 1e-6, 0.9), 20);
    let dense = brute(log_spaced(400, 1e-6, 0.9), 200);
    assert!((ours.value - same_grid).abs() < 1e-9, "{} vs {same_grid}", ours.value);
    // A 60 x 20 grid loses a few percent against 400 x 200.
    assert!(ours.value <= dense + 1e-9 && ours.value > 0.95 * dense, "{} vs {dense}", ours.value);
    assert!(ours.value > 0.0 && ours.value < lmax);
    assert!(ours.exponent < 0.0);
    assert!((ours.value - 0.333_938_2).abs() < 1e-6, "regression: {}", ours.value);
}

#[test]
fn lambda_tilde_max_matches_dense_grid_oracle() {
    let (alpha, p, rho) = (0.9, 0.5, 0.1);
    let mu_half = 0.5 * abs_moment_closed_form(p);
    let t_grid: Vec<f64> = (1..=3000).map(|i| 0.02 * i as f64).collect();
    let lm: Vec<f64> = t_grid.iter().map(|&t| indicator(log_mgf_simpson(t, p))).collect();
    let levels: Vec<f64> = (1..=2000).map(|j| mu_half + (6.0 - mu_half) * j as f64 / 2000.0).collect();
    let rates: Vec<f64> = levels
        .iter()
        .map(|&a| {
            t_grid
                .iter()
                .zip(&lm)
                .map(|(&t, &l)| a * t - l)
                .fold(0.0, f64::max)
        })
        .collect();
    let mut oracle = f64::INFINITY;
    for g in log_spaced(200, 1e-6, 0.9) {
        let net = (1.0 - alpha) * (2.0 / g).ln_1p();
        if let Some(j) = rates.iter().position(|&r| net - rho * r < 0.0) {
            oracle = oracle.min(levels[j] / (1.0 - g.powf(p)));
        }
    }
    let ours = compute_lambda_tilde_max(alpha, p, rho, &cfg()).unwrap();
    assert!(ours.value > mu_half);
    assert!((ours.value - oracle).abs() < 0.01 * oracle, "{} vs {oracle}", ours.value);
    assert!((ours.value - 1.982_829_2).abs() < 1e-5, "regression: {}", ours.value);
}

#[test]
fn lambda_tilde_max_grows_as_rho_shrinks() {
    let c = ExponentSearchConfig::with_grid_sizes(20, 5);
    let mut prev = 0.0;
    for &rho in &[0.8, 0.6, 0.4, 0.2, 0.1, 0.05] {
        let l = compute_lambda_tilde_max(0.9, 0.5, rho, &c).unwrap().value;
        assert!(l > 0.5 * abs_moment_closed_form(0.5));
        assert!(l >= prev - 1e-6, "rho={rho}");
        prev = l;
    }
}

#[test]
fn strong_bound_is_monotone_in_alpha_and_refinement() {
    let coarse = ExponentSearchConfig::with_grid_sizes(15, 5);
    let fine = ExponentSearchConfig::with_grid_sizes(29, 5);
    for &p in &[0.5, 1.0] {
        let mut prev = 0.0;
        for &alpha in &[0.6, 0.75, 0.9, 0.99] {
            let b = strong_bound(alpha, p, &coarse).unwrap();
            assert!(b.exponent_margin < 0.0);
            assert!(b.lambda_min < b.lambda_max && b.lambda_max > abs_moment_closed_form(p));
            assert!(b.rho_bound >= prev - coarse.a_tol, "p={p} alpha={alpha}");
            prev = b.rho_bound;
            let refined = strong_bound(alpha, p, &fine).unwrap();
            assert!(refined.rho_bound >= b.rho_bound - coarse.a_tol);
        }
    }
}

#[test]
fn weak_bound_dominates_strong_and_stays_below_two_thirds() {
    let c = ExponentSearchConfig::with_grid_sizes(15, 5);
    for &p in &[0.5, 1.0] {
        for &alpha in &[0.7, 0.95] {
            let w = weak_bound(alpha, p, &c).unwrap();
            let s = strong_bound(alpha, p, &c).unwrap();
            assert!(w.rho_bound >= s.rho_bound, "p={p} alpha={alpha}");
            assert!(w.rho_bound > 0.0 && w.rho_bound < 2.0 / 3.0);
            assert!(w.exponent_margin < 0.0);
        }
    }
}

#[test]
fn weak_bound_is_a_bisection_fixed_point() {
    let c = ExponentSearchConfig::with_grid_sizes(15, 5);
    let w = weak_bound(0.9, 0.5, &c).unwrap();
    assert!(weak_inequality_holds(w.rho_bound, 0.9, 0.5, &c).unwrap());
    assert!(!weak_inequality_holds(w.rho_bound + 0.01, 0.9, 0.5, &c).unwrap());
    let refined = weak_bound(0.9, 0.5, &ExponentSearchConfig::with_grid_sizes(29, 5)).unwrap();
    assert!(refined.rho_bound >= w.rho_bound - c.a_tol);
}

#[test]
fn bound_record_serializes_with_grids() {
    let c = ExponentSearchConfig::with_grid_sizes(8, 3);
    let b = strong_bound(0.9, 1.0, &c).unwrap();
    let json = serde_json::to_value(&b).unwrap();
    assert_eq!(json["kind"], "strong");
    assert_eq!(json["config"]["gamma_grid"].as_array().unwrap().len(), 8);
    assert!(json["winning_gamma"].as_f64().unwrap() > 0.0);
}
