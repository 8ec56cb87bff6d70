mod common;

use common::random_matrix;
use detlev::matrix::orthonormalize;
use detlev::{
    best_rank_k_errors, exact_basis, frequent_directions_basis, rangefinder_basis, spectral_norm,
    svd, DenseMatrix,
};

fn residual(a: &DenseMatrix, z: &DenseMatrix) -> DenseMatrix {
    a.sub(&a.matmul(z).unwrap().matmul(&z.transpose()).unwrap()).unwrap()
}

/// `U·diag(sigma)·Vᵀ` with random orthonormal `U`, `V`.
fn with_spectrum(m: usize, n: usize, sigma: &[f64], seed: u64) -> DenseMatrix {
    let p = sigma.len();
    let u = orthonormalize(&random_matrix(m, p, seed)).unwrap();
    let v = orthonormalize(&random_matrix(n, p, seed + 1)).unwrap();
    u.matmul(&DenseMatrix::from_diag(sigma).unwrap()).unwrap().matmul(&v.transpose()).unwrap()
}

#[test]
fn exact_basis_examples() {
    let a = DenseMatrix::from_diag(&[3.0, 2.0, 1.0]).unwrap();
    let z = exact_basis(&a, 2).unwrap().z;
    assert!((z.get(0, 0).abs() - 1.0).abs() < 1e-15 && (z.get(1, 1).abs() - 1.0).abs() < 1e-15);

    let low = random_matrix(6, 3, 1).matmul(&random_matrix(3, 5, 2)).unwrap();
    let z = exact_basis(&low, 3).unwrap().z;
    assert!(residual(&low, &z).frobenius_norm() <= 1e-12 * low.frobenius_norm());

    let a = random_matrix(8, 6, 3);
    let z = exact_basis(&a, 3).unwrap().z;
    let (_, tail) = best_rank_k_errors(&svd(&a).unwrap(), 3);
    assert!((residual(&a, &z).frobenius_norm() - tail).abs() <= 1e-8);
}

#[test]
fn frequent_directions_on_rank_k_input() {
    let a = random_matrix(50, 4, 5).matmul(&random_matrix(4, 20, 6)).unwrap();
    let z = frequent_directions_basis(&a, 4, 0.5).unwrap().z;
    assert!(residual(&a, &z).frobenius_norm() <= 1e-8 * a.frobenius_norm());
}

#[test]
fn frequent_directions_guarantee() {
    let a = random_matrix(60, 40, 7);
    let (_, tail) = best_rank_k_errors(&svd(&a).unwrap(), 5);
    for (eps, limit) in [(0.5, 1.5), (1.0, 2.0)] {
        let b = frequent_directions_basis(&a, 5, eps).unwrap();
        assert!(b.z.orthonormality_error() < 1e-12);
        let ratio = residual(&a, &b.z).frobenius_norm() / tail;
        assert!(ratio * ratio <= limit, "eps {eps}: ratio² {}", ratio * ratio);
    }
}

#[test]
fn frequent_directions_falls_back_to_exact_when_sketch_covers_rows() {
    let a = random_matrix(10, 30, 8);
    let fd = frequent_directions_basis(&a, 3, 0.5).unwrap().z;
    let ex = exact_basis(&a, 3).unwrap().z;
    let diff = residual(&a, &fd).frobenius_norm() - residual(&a, &ex).frobenius_norm();
    assert!(diff.abs() < 1e-10);
}

#[test]
fn rangefinder_on_rank_k_input() {
    let a = random_matrix(30, 5, 9).matmul(&random_matrix(5, 25, 10)).unwrap();
    let z = rangefinder_basis(&a, 5, 0.5, 1).unwrap().z;
    assert!(spectral_norm(&residual(&a, &z)) <= 1e-8 * spectral_norm(&a));
}

#[test]
fn rangefinder_mean_ratio() {
    let sigma: Vec<f64> = (0..50).map(|i| 0.85f64.powi(i)).collect();
    let a = with_spectrum(80, 50, &sigma, 11);
    let (k, eps) = (5, 0.5);
    let reference = sigma[k];
    let mean: f64 = (0..20)
        .map(|seed| {
            let z = rangefinder_basis(&a, k, eps, seed).unwrap().z;
            assert!(z.orthonormality_error() < 1e-12);
            spectral_norm(&residual(&a, &z)) / reference
        })
        .sum::<f64>()
        / 20.0;
    assert!(mean <= 2f64.sqrt() + eps + 0.2, "mean ratio {mean}");
}

#[test]
fn rangefinder_is_deterministic_given_seed() {
    let a = random_matrix(20, 15, 12);
    let z1 = rangefinder_basis(&a, 3, 0.3, 99).unwrap().z;
    let z2 = rangefinder_basis(&a, 3, 0.3, 99).unwrap().z;
    assert_eq!(z1, z2);
}
