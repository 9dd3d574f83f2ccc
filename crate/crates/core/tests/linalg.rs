use lp_recovery::linalg::*;
use nalgebra::{DMatrix, DVector};

fn to_na(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.data())
}

fn shapes(count: usize) -> Vec<(usize, usize, RngSeed)> {
    let mut g = GaussianStream::new(RngSeed(99));
    (0..count)
        .map(|i| {
            let n = 2 + g.below(63);
            let m = 1 + g.below(n - 1);
            (m, n, RngSeed(1000 + i as u64))
        })
        .collect()
}

#[test]
fn sampled_matrix_is_frozen() {
    let a = sample_gaussian_matrix(2, 3, RngSeed(42));
    let again = sample_gaussian_matrix(2, 3, RngSeed(42));
    assert_eq!(a, again);
    let frozen = [
        1.440_254_079_119_1,
        -0.465_213_078_008_070_1,
        -0.735_682_235_615_744,
        -0.757_835_099_928_305_2,
        0.485_237_335_720_624_3,
        0.667_509_070_430_985_2,
    ];
    for (v, f) in a.data().iter().zip(frozen) {
        assert_eq!(*v, f, "{:?}", a.data());
    }
}

#[test]
fn sample_moments() {
    let a = sample_gaussian_matrix(1000, 1000, RngSeed(5));
    let n = a.data().len() as f64;
    let mean = a.data().iter().sum::<f64>() / n;
    let var = a.data().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    assert!(mean.abs() <= 0.005, "{mean}");
    assert!((0.99..=1.01).contains(&var), "{var}");
}

#[test]
fn null_space_postconditions_on_random_shapes() {
    for (m, n, seed) in shapes(200) {
        let a = sample_gaussian_matrix(m, n, seed);
        let b = null_space_basis(&a).unwrap();
        assert_eq!((b.rows(), b.cols()), (n, n - m));
        let ab = a.matmul(&b).unwrap();
        assert!(ab.max_abs() <= 1e-10 * a.max_abs() * n as f64, "{m}x{n}");
        let btb = b.transpose().matmul(&b).unwrap();
        let gap = btb
            .data()
            .iter()
            .enumerate()
            .map(|(k, v)| (v - if k / btb.cols() == k % btb.cols() { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        assert!(gap <= 1e-12, "{m}x{n}: {gap}");
    }
}

#[test]
fn null_space_matches_nalgebra_projector() {
    let a = sample_gaussian_matrix(5, 8, RngSeed(3));
    let b = to_na(&null_space_basis(&a).unwrap());
    let an = to_na(&a);
    // I - A^T (A A^T)^{-1} A is the projector onto ker A.
    let proj = DMatrix::identity(8, 8) - an.transpose() * (&an * an.transpose()).try_inverse().unwrap() * &an;
    let ours = &b * b.transpose();
    assert!((proj - ours).amax() < 1e-12);
}

#[test]
fn kernel_of_example_vector() {
    // Rows orthogonal to beta = (1, -1, 1/8, 1/8, 1/8, 1/8): the kernel is beta's span.
    let beta = [1.0, -1.0, 0.125, 0.125, 0.125, 0.125];
    let mut rows = Vec::new();
    for j in 1..6 {
        let mut r = vec![0.0; 6];
        r[0] = beta[j];
        r[j] = -beta[0];
        rows.push(r);
    }
    let a = DenseMatrix::from_rows(&rows).unwrap();
    let b = null_space_basis(&a).unwrap();
    let nb = norm2(&beta);
    let cos: f64 = (0..6).map(|i| b.get(i, 0) * beta[i] / nb).sum();
    assert!((cos.abs() - 1.0).abs() < 1e-13);
}

#[test]
fn weighted_solve_postconditions() {
    let mut g = GaussianStream::new(RngSeed(17));
    for (m, n, seed) in shapes(200) {
        let a = sample_gaussian_matrix(m, n, seed);
        let y = g.normal_vec(m);
        let w: Vec<f64> = (0..n).map(|_| 0.1 + 10.0 * g.uniform()).collect();
        let x = min_norm_weighted_solve(&a, &y, &w).unwrap();
        let r: Vec<f64> = a.matvec(&x).unwrap().iter().zip(&y).map(|(u, v)| u - v).collect();
        assert!(norm2(&r) <= 1e-9 * norm2(&y).max(1.0), "{m}x{n}");
        if m < n {
            let b = null_space_basis(&a).unwrap();
            let wx: Vec<f64> = x.iter().zip(&w).map(|(u, v)| u * v).collect();
            let orth = b.transpose().matvec(&wx).unwrap();
            assert!(norm_inf(&orth) <= 1e-9 * norm_inf(&wx).max(1.0), "{m}x{n}");
        }
    }
}

#[test]
fn weighted_solve_matches_normal_equations() {
    let a = sample_gaussian_matrix(4, 8, RngSeed(11));
    let y = [1.0, -2.0, 0.5, 3.0];
    let w = [1.0, 2.0, 3.0, 4.0, 0.5, 0.25, 7.0, 1.5];
    let ours = min_norm_weighted_solve(&a, &y, &w).unwrap();
    let an = to_na(&a);
    let winv = DMatrix::from_diagonal(&DVector::from_iterator(8, w.iter().map(|v| 1.0 / v)));
    let gram = &an * &winv * an.transpose();
    let oracle = &winv * an.transpose() * gram.try_inverse().unwrap() * DVector::from_row_slice(&y);
    for (u, v) in ours.iter().zip(oracle.iter()) {
        assert!((u - v).abs() < 1e-8);
    }
}

#[test]
fn ill_conditioned_weights_are_rejected() {
    let a = DenseMatrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]]).unwrap();
    let err = min_norm_weighted_solve(&a, &[1.0, 1.0], &[1e20, 1.0, 1e20]).unwrap_err();
    assert!(matches!(err, lp_recovery::Error::IllConditioned { .. }));
}

#[test]
fn least_squares_matches_nalgebra() {
    let a = sample_gaussian_matrix(9, 4, RngSeed(8));
    let b: Vec<f64> = (0..9).map(|i| i as f64 - 3.0).collect();
    let (x, resid) = least_squares(&a, &b).unwrap();
    let an = to_na(&a);
    let oracle = an.clone().svd(true, true).solve(&DVector::from_row_slice(&b), 1e-14).unwrap();
    for (u, v) in x.iter().zip(oracle.iter()) {
        assert!((u - v).abs() < 1e-10);
    }
    assert!((resid - (an * oracle - DVector::from_row_slice(&b)).norm()).abs() < 1e-10);
}
