mod common;

use common::{random_matrix, singular_values, subsets};
use detlev::matrix::orthonormalize;
use detlev::selectors::SelectionResult;
use detlev::{
    check_rank_preservation, comparison_counts, error_report, lemma1_certificate,
    leverage_scores, orthonormal_basis, projection_residual, restricted_rank_k,
    select_deterministic, spectral_norm, svd, theorem1_factor, theorem2_column_bound, DenseMatrix,
    Error, SelectionMethod,
};
use proptest::prelude::*;

fn pick(indices: &[usize]) -> SelectionResult {
    SelectionResult {
        indices: indices.to_vec(),
        c: indices.len(),
        mass: None,
        method: SelectionMethod::DeterministicLeverage,
        seed: None,
        theta: None,
    }
}

#[test]
fn diagonal_report() {
    let a = DenseMatrix::from_diag(&[3.0, 2.0, 1.0]).unwrap();
    let r = error_report(&a, &pick(&[0, 1]), 2).unwrap();
    assert!((r.spectral_abs - 1.0).abs() < 1e-14);
    assert!((r.spectral_ratio.unwrap() - 1.0).abs() < 1e-14);
    let all = error_report(&a, &pick(&[0, 1, 2]), 2).unwrap();
    assert!(all.spectral_abs < 1e-14 && all.frobenius_abs < 1e-14);
}

#[test]
fn deterministic_selection_on_six_by_eight() {
    let a = random_matrix(6, 8, 42);
    let v = svd(&a).unwrap().v_k(2).unwrap();
    let s = select_deterministic(&leverage_scores(&v, 2).unwrap(), 1.5).unwrap();
    let r = error_report(&a, &s, 2).unwrap();
    assert!(r.spectral_ratio.unwrap().powi(2) < 2.0);
    assert!(r.frobenius_ratio.unwrap().powi(2) < 2.0);
    // No column subset of the same size does better than the exhaustive floor.
    let floor = subsets(8, s.c)
        .into_iter()
        .map(|sub| {
            let c = a.select_columns(&sub).unwrap();
            spectral_norm(&projection_residual(&a, &c).unwrap())
        })
        .fold(f64::INFINITY, f64::min);
    assert!(r.spectral_abs >= floor - 1e-12);
}

#[test]
fn certificate_examples() {
    let mut rows = vec![vec![0.0; 3]; 6];
    for (i, row) in rows.iter_mut().enumerate().take(3) {
        row[i] = 1.0;
    }
    let v = DenseMatrix::from_rows(&rows).unwrap();
    assert_eq!(lemma1_certificate(&v, &pick(&[0, 1, 2])).unwrap(), 1.0);
    assert!(check_rank_preservation(&v, &pick(&[0, 1, 2]), 1e-10).unwrap());
}

/// Orthonormal `V_k` (8 × 2) whose two largest rows are identical, so the
/// top-2 selection has rank one. Scores: 0.36, 0.36, 0.28, 0.28, 0.18 × 4.
fn duplicate_row_basis() -> DenseMatrix {
    let h: f64 = 0.6;
    let r = ((1.0 - 2.0 * h * h) / 2.0).sqrt();
    let s = h / 2f64.sqrt();
    DenseMatrix::from_rows(&[
        vec![h, 0.0],
        vec![h, 0.0],
        vec![r, r],
        vec![r, -r],
        vec![0.0, s],
        vec![0.0, s],
        vec![0.0, s],
        vec![0.0, s],
    ])
    .unwrap()
}

#[test]
fn duplicate_rows_collapse_the_certificate() {
    let v = duplicate_row_basis();
    let p = leverage_scores(&v, 2).unwrap();
    assert_eq!(&p.order()[..2], &[0, 1]);
    let top2 = pick(&[0, 1]);
    assert_eq!(lemma1_certificate(&v, &top2).unwrap(), 0.0);
    assert!(!check_rank_preservation(&v, &top2, 1e-10).unwrap());
}

#[test]
fn generic_rows_preserve_rank() {
    for seed in 0..10 {
        let v = orthonormalize(&random_matrix(12, 3, seed)).unwrap();
        assert!(check_rank_preservation(&v, &pick(&[1, 4, 7, 9]), 1e-10).unwrap());
        assert!(check_rank_preservation(&v, &pick(&[2, 5, 11]), 1e-10).unwrap());
    }
}

#[test]
fn restricted_projection_with_c_equal_k_is_the_projection() {
    let a = random_matrix(5, 6, 3);
    let sel = pick(&[0, 2, 5]);
    let (approx, _) = restricted_rank_k(&a, &sel, 3).unwrap();
    let q = orthonormal_basis(&a.select_columns(&[0, 2, 5]).unwrap()).unwrap();
    let plain = q.matmul(&q.t_matmul(&a).unwrap()).unwrap();
    assert!(approx.sub(&plain).unwrap().max_abs() < 1e-12);
    assert!(matches!(restricted_rank_k(&a, &pick(&[0, 1]), 3), Err(Error::InvalidRank { .. })));
}

/// Smallest spectral error among `Q·P·QᵀA` for rank-2 projectors `P` on a
/// grid of planes in `R^c` (c ≤ 3): an upper bound on the in-span optimum.
fn grid_search_upper_bound(a: &DenseMatrix, q: &DenseMatrix) -> f64 {
    let b = q.t_matmul(a).unwrap();
    let c = q.cols();
    if c <= 2 {
        return spectral_norm(&a.sub(&q.matmul(&b).unwrap()).unwrap());
    }
    // A plane in R^3 is the orthogonal complement of a unit normal.
    let steps = 90;
    let mut best = f64::INFINITY;
    for i in 0..steps {
        for j in 0..2 * steps {
            let (th, ph) = (
                std::f64::consts::PI * i as f64 / steps as f64,
                std::f64::consts::PI * j as f64 / steps as f64,
            );
            let nrm = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
            let mut p = DenseMatrix::identity(3);
            for r in 0..3 {
                for s in 0..3 {
                    p.set(r, s, p.get(r, s) - nrm[r] * nrm[s]);
                }
            }
            let approx = q.matmul(&p.matmul(&b).unwrap()).unwrap();
            best = best.min(spectral_norm(&a.sub(&approx).unwrap()));
        }
    }
    best
}

#[test]
fn restricted_spectral_error_against_search_and_lower_bound() {
    for seed in 0..6 {
        let a = random_matrix(5, 6, 300 + seed);
        let sel = pick(&[0, 1, 3]);
        let (_, report) = restricted_rank_k(&a, &sel, 2).unwrap();
        let q = orthonormal_basis(&a.select_columns(&[0, 1, 3]).unwrap()).unwrap();
        let outside = spectral_norm(&projection_residual(&a, &q).unwrap());
        let inside = singular_values(&q.t_matmul(&a).unwrap())[2];
        let lower = outside.max(inside);
        let upper = grid_search_upper_bound(&a, &q);
        assert!(lower <= upper + 1e-12);
        assert!(report.spectral_abs <= 2.0 * lower + 1e-12);
        assert!(report.spectral_abs.powi(2) <= 2.0 * lower.powi(2) + 1e-12);
    }
}

#[test]
fn bound_calculators() {
    assert_eq!(theorem1_factor(0.5).unwrap(), 2.0);
    assert!(theorem1_factor(0.1).unwrap() <= 1.2);
    assert!(matches!(theorem1_factor(1.5), Err(Error::InvalidEpsilon(_))));
    assert_eq!(theorem2_column_bound(10, 0.5, 1.0).unwrap(), 39);
    assert_eq!(theorem2_column_bound(10, 0.5, 0.5).unwrap(), 6399);
    assert_eq!(theorem2_column_bound(10, 0.5, 1e3).unwrap(), 10);
    let b = comparison_counts(10, 0.5, 1.0).unwrap();
    assert_eq!((b.bdm11a_c, b.dmm08_c, b.theorem2_c), (40, 93, 39));
    assert!(b.theorem1_factor > 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pythagorean_identity(seed in any::<u64>(), m in 3usize..8, n in 3usize..9, c in 2usize..5, k in 1usize..3) {
        prop_assume!(k <= c && c <= n);
        let a = random_matrix(m, n, seed);
        let idx: Vec<usize> = (0..c).collect();
        let (approx, report) = restricted_rank_k(&a, &pick(&idx), k).unwrap();
        let q = orthonormal_basis(&a.select_columns(&idx).unwrap()).unwrap();
        let b = q.t_matmul(&a).unwrap();
        let outside = projection_residual(&a, &q).unwrap().frobenius_norm().powi(2);
        let tail: f64 = singular_values(&b).iter().skip(k).map(|s| s * s).sum();
        let lhs = a.sub(&approx).unwrap().frobenius_norm().powi(2);
        prop_assert!((lhs - (outside + tail)).abs() <= 1e-8 * lhs.max(1e-12));
        prop_assert!((report.frobenius_abs.powi(2) - lhs).abs() <= 1e-8 * lhs.max(1e-12));
        prop_assert!(svd(&approx).map(|f| f.rank()).unwrap_or(0) <= k);
    }

    #[test]
    fn rank_constraint_only_hurts(seed in any::<u64>(), c in 2usize..5) {
        let a = random_matrix(6, 7, seed);
        let idx: Vec<usize> = (0..c).collect();
        let plain = error_report(&a, &pick(&idx), 1).unwrap();
        let (_, restricted) = restricted_rank_k(&a, &pick(&idx), 1).unwrap();
        prop_assert!(restricted.frobenius_abs >= plain.frobenius_abs - 1e-12);
        let (_, equal) = restricted_rank_k(&a, &pick(&idx), c).unwrap();
        prop_assert!((equal.frobenius_abs - plain.frobenius_abs).abs() <= 1e-10);
    }

    #[test]
    fn report_invariants(seed in any::<u64>(), k in 1usize..4) {
        let a = random_matrix(5, 7, seed);
        let r = error_report(&a, &pick(&[0, 3, 6]), k).unwrap();
        prop_assert!(r.spectral_abs >= 0.0 && r.spectral_abs <= r.frobenius_abs);
        prop_assert_eq!(r.spectral_ratio.is_some(), r.spectral_ref > 0.0);
        prop_assert_eq!(r.frobenius_ratio.is_some(), r.frobenius_ref > 0.0);
    }

    #[test]
    fn certificate_bounds_the_ratio(seed in any::<u64>(), eps in 0.05f64..0.95) {
        let a = random_matrix(8, 14, seed);
        let k = 3;
        let v = svd(&a).unwrap().v_k(k).unwrap();
        let s = select_deterministic(&leverage_scores(&v, k).unwrap(), k as f64 - eps).unwrap();
        let cert = lemma1_certificate(&v, &s).unwrap();
        prop_assert!(cert > 1.0 - eps);
        let r = error_report(&a, &s, k).unwrap();
        for ratio in [r.spectral_ratio.unwrap(), r.frobenius_ratio.unwrap()] {
            prop_assert!(ratio * ratio <= 1.0 / cert + 1e-8);
            prop_assert!(ratio * ratio < theorem1_factor(eps).unwrap());
        }
    }
}
