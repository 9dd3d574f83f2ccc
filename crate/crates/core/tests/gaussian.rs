use lp_recovery::gaussian::*;
use proptest::prelude::*;
use statrs::function::gamma::gamma;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn abs_moment_against_statrs_gamma() {
    for i in 1..=10 {
        let p = i as f64 / 10.0;
        let oracle = 2f64.powf(p / 2.0) * gamma((p + 1.0) / 2.0) / std::f64::consts::PI.sqrt();
        let got = abs_moment(p, &cfg()).unwrap();
        assert!(close(got, oracle, 1e-10), "p={p}: {got} vs {oracle}");
    }
    assert!(close(abs_moment(2.0, &cfg()).unwrap(), 1.0, 1e-12));
    assert!(close(abs_moment(1.0, &cfg()).unwrap(), 0.797_884_560_802_865_4, 1e-12));
    assert!(close(abs_moment(0.5, &cfg()).unwrap(), 0.822_178_958_662_458_6, 1e-11));
}

#[test]
fn mgf_regression_constants() {
    let c = cfg();
    assert!(close(mgf_pos(1.0, 1.0, &c).unwrap(), 2.774_285_957_670_01, 1e-11));
    assert!(close(mgf_pos(1.0, 0.5, &c).unwrap(), 2.419_136_430_467_954, 1e-11));
    assert!(close(mgf_pos(3.0, 0.3, &c).unwrap(), 17.003_967_211_442_85, 1e-10));
    assert!(close(log_mgf_pos(40.0, 0.5, &c).unwrap(), 81.921_647_976_295_95, 1e-12));
    assert!(close(mgf_neg(1.0, 1.0, &c).unwrap(), 0.523_156_583_730_246_7, 1e-11));
    assert!(close(mgf_neg(1.0, 0.5, &c).unwrap(), 0.466_666_546_725_070_1, 1e-11));
    assert!(close(mgf_neg(4.0, 0.5, &c).unwrap(), 0.088_959_228_962_194_1, 1e-10));
    assert!(close(mgf_indicator(1.0, 1.0, &c).unwrap(), 1.887_142_978_835_005, 1e-11));
}

#[test]
fn p_two_mgf_closed_form() {
    // E[e^{tX^2}] = (1-2t)^{-1/2}; outside the (0,1] contract, so compared via the
    // partial-moment route on a tilted integrand instead.
    let c = cfg();
    for &t in &[0.1, 0.25, 0.4] {
        let v = lp_recovery::quadrature::integrate(
            |x: f64| half_normal_pdf(x) * (t * x * x).exp(),
            &[0.0, 1.0, 40.0],
            &c,
        )
        .unwrap()
        .value;
        assert!(close(v, (1.0 - 2.0 * t).powf(-0.5), 1e-10));
    }
}

#[test]
fn negative_mgf_bound_example() {
    let bound = mgf_neg_upper_bound(4.0, 0.5);
    assert!(close(bound, 4f64.powf(-2.0) * SQRT_2_OVER_PI * 1.0 / 0.5, 1e-14));
    assert!(mgf_neg(4.0, 0.5, &cfg()).unwrap() <= bound);
}

#[test]
fn negative_mgf_bounds_on_grid() {
    let c = cfg();
    for &p in &[0.1, 0.3, 0.5, 0.7, 1.0] {
        for &t in &[1.0, 1.5, 3.0, 10.0, 30.0, 100.0] {
            let v = mgf_neg(t, p, &c).unwrap();
            assert!(v > 0.0 && v < 1.0);
            assert!(v <= mgf_neg_upper_bound(t, p) * (1.0 + 1e-12), "p={p} t={t}");
            if t > 1.0 {
                assert!(v >= mgf_neg_lower_bound(t, p, &c).unwrap() * (1.0 - 1e-12));
            }
        }
    }
}

#[test]
fn cdf_is_antiderivative_of_pdf() {
    let h = 1e-5;
    for i in 0..=50 {
        let z = 0.1 * i as f64 + 1e-3;
        let fd = (half_normal_cdf(z + h) - half_normal_cdf(z - h)) / (2.0 * h);
        assert!((fd - half_normal_pdf(z)).abs() < 1e-6, "z={z}");
    }
}

#[test]
fn log_mgfs_are_convex() {
    let c = cfg();
    let h = 0.05;
    for &p in &[0.2, 0.5, 1.0] {
        for i in 1..40 {
            let t = 0.25 * i as f64;
            let lp = |s: f64| log_mgf_pos(s, p, &c).unwrap();
            let ln = |s: f64| mgf_neg(s, p, &c).unwrap().ln();
            assert!(lp(t + h) - 2.0 * lp(t) + lp(t - h) >= -1e-8, "pos p={p} t={t}");
            assert!(ln(t + h) - 2.0 * ln(t) + ln(t - h) >= -1e-8, "neg p={p} t={t}");
        }
    }
}

#[test]
fn log_mgf_slope_at_zero_is_the_moment() {
    let c = cfg();
    for &p in &[0.1, 0.5, 0.9, 1.0] {
        let h = 1e-6;
        let slope = log_mgf_pos(h, p, &c).unwrap() / h;
        assert!((slope - abs_moment_closed_form(p)).abs() < 1e-5, "p={p}");
    }
}

#[test]
fn tilted_moments_are_derivatives() {
    let c = cfg();
    for &(t, p) in &[(0.5, 0.5), (2.0, 1.0), (30.0, 0.5), (300.0, 0.8)] {
        let m = tilted_moments(t, p, &c).unwrap();
        let h = 1e-4 * t;
        let d1 = (log_mgf_pos(t + h, p, &c).unwrap() - log_mgf_pos(t - h, p, &c).unwrap()) / (2.0 * h);
        let mp = tilted_moments(t + h, p, &c).unwrap().mean;
        let mm = tilted_moments(t - h, p, &c).unwrap().mean;
        assert!(close(m.mean, d1, 1e-6), "t={t} p={p}: {} vs {d1}", m.mean);
        assert!(close(m.variance, (mp - mm) / (2.0 * h), 1e-4));
        assert!(close(m.log_mgf, log_mgf_pos(t, p, &c).unwrap(), 1e-13));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn indicator_identity(t in 0.0f64..20.0, p in 0.05f64..1.0) {
        let c = cfg();
        let pos = mgf_pos(t, p, &c).unwrap();
        let ind = mgf_indicator(t, p, &c).unwrap();
        prop_assert_eq!(ind, 0.5 * pos + 0.5);
        prop_assert!(close(log_mgf_indicator(t, p, &c).unwrap().exp(), ind, 1e-12));
    }

    #[test]
    fn mgf_pos_increasing(t in 0.0f64..50.0, dt in 0.01f64..1.0, p in 0.05f64..=1.0) {
        let c = cfg();
        prop_assert!(log_mgf_pos(t + dt, p, &c).unwrap() > log_mgf_pos(t, p, &c).unwrap());
        prop_assert!(mgf_pos(t, p, &c).unwrap() >= 1.0);
    }

    #[test]
    fn cdf_monotone(a in 0.0f64..10.0, d in 0.0f64..1.0) {
        prop_assert!(half_normal_cdf(a + d) >= half_normal_cdf(a));
    }
}
