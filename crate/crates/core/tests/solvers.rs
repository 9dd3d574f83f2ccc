use lp_recovery::instances::*;
use lp_recovery::linalg::*;
use lp_recovery::solvers::*;
use proptest::prelude::*;

fn feasible(inst: &RecoveryInstance, r: &SolverResult) {
    let resid = inst.residual(&r.x_hat).unwrap();
    assert!(resid <= 1e-6 * (1.0 + norm2(&inst.y)), "residual {resid}");
}

/// Minimum l1 norm over all basic solutions (column subsets of size m).
fn l1_vertex_oracle(inst: &RecoveryInstance) -> f64 {
    let (m, n) = (inst.a.rows(), inst.a.cols());
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|j| mask & (1 << j) != 0).collect();
        if let Ok((x, _)) = least_squares(&inst.a.select_cols(&idx), &inst.y) {
            best = best.min(x.iter().map(|v| v.abs()).sum());
        }
    }
    best
}

#[test]
fn l1_recovers_two_level_vector_on_kernel_construction() {
    let inst = kernel_instance(2, 1.0).unwrap();
    let r = solve_l1(&inst).unwrap();
    assert!(r.converged);
    let x = two_level_sparse(2);
    for (u, v) in r.x_hat.iter().zip(&x) {
        assert!((u - v).abs() <= 1e-6, "{:?}", r.x_hat);
    }
    assert_eq!(r.recovered, Some(true));
    feasible(&inst, &r);
}

#[test]
fn zero_measurements_give_zero() {
    let a = sample_gaussian_matrix(3, 7, RngSeed(1));
    let inst = RecoveryInstance::new(a, vec![0.0; 3], 0.5, None).unwrap();
    let l1 = solve_l1(&inst).unwrap();
    assert!(norm_inf(&l1.x_hat) == 0.0 && l1.objective == 0.0);
    let irls = solve_lp_irls(&inst, &IrlsConfig::default()).unwrap();
    assert!(norm_inf(&irls.x_hat) == 0.0 && irls.iterations == 1 && irls.converged);
    let l0 = solve_l0_exhaustive(&inst, 3).unwrap();
    assert!(norm_inf(&l0.x_hat) == 0.0 && l0.objective == 0.0);
}

#[test]
fn l1_matches_vertex_enumeration() {
    for s in 0..20u64 {
        let inst = random_sparse_instance(4, 9, 3, 1.0, RngSeed(500 + s)).unwrap();
        let r = solve_l1(&inst).unwrap();
        assert!(r.converged);
        feasible(&inst, &r);
        let oracle = l1_vertex_oracle(&inst);
        assert!((r.objective - oracle).abs() <= 1e-8 * (1.0 + oracle), "{} vs {oracle}", r.objective);
    }
}

#[test]
fn l1_and_l0_agree_on_seeded_two_sparse_instance() {
    let inst = random_sparse_instance(6, 12, 2, 1.0, RngSeed(2026)).unwrap();
    let l1 = solve_l1(&inst).unwrap();
    let l0 = solve_l0_exhaustive(&inst, 6).unwrap();
    assert_eq!(l0.objective, 2.0);
    for (u, v) in l1.x_hat.iter().zip(&l0.x_hat) {
        assert!((u - v).abs() <= 1e-8);
    }
}

#[test]
fn l1_and_l0_agree_on_one_sparse_instances() {
    let mut agree = 0;
    for s in 0..100u64 {
        let inst = random_sparse_instance(8, 12, 1, 1.0, RngSeed(10_000 + s)).unwrap();
        let l1 = solve_l1(&inst).unwrap();
        let l0 = solve_l0_exhaustive(&inst, 8).unwrap();
        assert_eq!(l0.objective, 1.0);
        let d: Vec<f64> = l1.x_hat.iter().zip(&l0.x_hat).map(|(u, v)| u - v).collect();
        if norm_inf(&d) <= 1e-8 {
            agree += 1;
        } else {
            // Disagreement is only acceptable when the sparsest vector is not an l1 minimizer.
            assert!(l1.objective < lp_quasinorm(&l0.x_hat, 1.0) - 1e-9, "seed {s}");
        }
    }
    assert!(agree >= 98, "{agree}/100");
}

#[test]
fn l0_single_column() {
    let a = sample_gaussian_matrix(4, 9, RngSeed(77));
    let y: Vec<f64> = a.column_vec(5).iter().map(|v| 3.0 * v).collect();
    let inst = RecoveryInstance::new(a, y, 0.0, None).unwrap();
    let r = solve_l0_exhaustive(&inst, 4).unwrap();
    assert_eq!(r.objective, 1.0);
    assert!((r.x_hat[5] - 3.0).abs() < 1e-12);
}

#[test]
fn l0_recovers_two_sparse_vector() {
    let inst = random_sparse_instance(5, 10, 2, 0.0, RngSeed(9)).unwrap();
    let r = solve_l0_exhaustive(&inst, 5).unwrap();
    assert_eq!(r.recovered, Some(true));
    let x = inst.x_true.as_ref().unwrap();
    for (u, v) in r.x_hat.iter().zip(x) {
        assert!((u - v).abs() < 1e-10);
    }
}

#[test]
fn l0_guards_against_large_enumerations() {
    let inst = random_sparse_instance(10, 30, 2, 0.0, RngSeed(1)).unwrap();
    assert!(solve_l0_exhaustive(&inst, 5).is_err());
    assert!(solve_l0_exhaustive(&inst, 4).is_ok());
}

#[test]
fn irls_beats_the_sparse_vector_on_kernel_construction() {
    let k = 4;
    let inst = kernel_instance(k, 0.5).unwrap();
    let x_star = two_level_sparse(k);
    let x_shift = shift_along_kernel(&x_star, 1.0);
    let star = lp_quasinorm(&x_star, 0.5);
    let shifted = lp_quasinorm(&x_shift, 0.5);
    assert!((star - 4.0 * k as f64).abs() < 1e-12);
    assert!((shifted - (10f64.sqrt() + 0.5) * k as f64).abs() < 1e-12);
    assert!(shifted < star);
    let r = solve_lp_irls(&inst, &IrlsConfig::default()).unwrap();
    feasible(&inst, &r);
    assert!(r.objective <= star + 1e-9, "{}", r.objective);
}

#[test]
fn irls_recovers_two_sparse_vectors() {
    let cfg = IrlsConfig::default();
    let mut hits = 0;
    for s in 0..100u64 {
        let inst = random_sparse_instance(20, 40, 2, 0.5, RngSeed(7_000 + s)).unwrap();
        let r = solve_lp_irls(&inst, &cfg).unwrap();
        if r.converged {
            feasible(&inst, &r);
        }
        hits += r.recovered.unwrap() as usize;
    }
    assert!(hits >= 95, "{hits}/100");
}

#[test]
fn irls_steps_do_not_increase_smoothed_objective() {
    let cfg = IrlsConfig::default();
    for (s, p) in [(1u64, 0.2), (2, 0.5), (3, 0.8)] {
        let inst = random_sparse_instance(15, 40, 4, p, RngSeed(s)).unwrap();
        let (_, trace) = solve_lp_irls_traced(&inst, &cfg).unwrap();
        assert!(!trace.is_empty());
        for step in &trace {
            assert!(step.after <= step.before + cfg.inner_tol, "{step:?}");
        }
    }
}

#[test]
fn quasinorm_of_kernel_vector() {
    assert!((lp_quasinorm(&kernel_vector(1), 0.5) - 2.5).abs() < 1e-15);
    let x = [0.3, -1.2, 4.0, 0.0];
    assert_eq!(lp_quasinorm(&x, 1.0), 0.3 + 1.2 + 4.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn quasinorm_triangle_inequality(
        x in prop::collection::vec(-10.0f64..10.0, 6),
        y in prop::collection::vec(-10.0f64..10.0, 6),
        pi in 0usize..4,
    ) {
        let p = [0.2, 0.5, 0.8, 1.0][pi];
        let sum: Vec<f64> = x.iter().zip(&y).map(|(u, v)| u + v).collect();
        prop_assert!(lp_quasinorm(&sum, p) <= lp_quasinorm(&x, p) + lp_quasinorm(&y, p) + 1e-12);
    }
}
