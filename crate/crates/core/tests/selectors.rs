mod common;

use common::random_matrix;
use detlev::evaluation::lemma1_certificate;
use detlev::matrix::orthonormalize;
use detlev::selectors::sampling_probabilities;
use detlev::{
    frequent_directions_basis, leverage_scores, select_deterministic, select_pivoted_qr,
    select_randomized, select_top_c, select_with_basis, svd, DenseMatrix, Error, LeverageProfile,
    SelectionMethod,
};
use proptest::prelude::*;

fn profile(k: usize, scores: &[f64]) -> LeverageProfile {
    LeverageProfile::from_scores(k, scores.to_vec()).unwrap()
}

#[test]
fn spec_examples() {
    let s = select_deterministic(&profile(2, &[1.0, 1.0, 0.0]), 1.5).unwrap();
    assert_eq!((s.indices.clone(), s.c, s.mass), (vec![0, 1], 2, Some(2.0)));

    assert_eq!(select_deterministic(&profile(2, &[0.2; 10]), 1.9).unwrap().c, 10);

    let s = select_deterministic(&profile(2, &[0.9, 0.5, 0.3, 0.3]), 0.8).unwrap();
    assert_eq!(s.c, 2);
}

#[test]
fn fast_decay_profile_with_k_two() {
    // ℓ₁ = k − 2kε, ℓ₂..ℓ_{2k} = ε, tail ε/(n − 2k) with k = 2, ε = 1/4, n = 8.
    // Every value is dyadic, so the top-2k sum equals k − ε exactly.
    let p = profile(2, &[1.0, 0.25, 0.25, 0.25, 0.0625, 0.0625, 0.0625, 0.0625]);
    assert_eq!(select_deterministic(&p, 1.75).unwrap().c, 5);
    assert_eq!(select_deterministic(&p, 1.75 - 1e-12).unwrap().c, 4);
}

#[test]
fn infeasible_threshold() {
    let p = profile(2, &[1.0, 1.0, 0.0]);
    assert!(matches!(select_deterministic(&p, 2.0), Err(Error::InfeasibleThreshold { .. })));
    assert!(matches!(select_deterministic(&p, 7.0), Err(Error::InfeasibleThreshold { .. })));
}

#[test]
fn randomized_excludes_zero_probability_columns() {
    let s = select_randomized(&profile(2, &[1.0, 1.0, 0.0, 0.0]), 500, 9).unwrap();
    assert!(s.indices.iter().all(|&i| i < 2));
}

#[test]
fn randomized_frequencies_follow_scores() {
    let s = select_randomized(&profile(1, &[0.1; 10]), 1000, 77).unwrap();
    let mut counts = [0usize; 10];
    s.indices.iter().for_each(|&i| counts[i] += 1);
    for c in counts {
        assert!((c as f64 / 1000.0 - 0.1).abs() <= 0.05, "{counts:?}");
    }
}

#[test]
fn randomized_is_reproducible() {
    let p = profile(2, &[0.5, 0.4, 0.3, 0.3, 0.25, 0.25]);
    assert_eq!(select_randomized(&p, 20, 5).unwrap(), select_randomized(&p, 20, 5).unwrap());
    assert_ne!(
        select_randomized(&p, 20, 5).unwrap().indices,
        select_randomized(&p, 20, 6).unwrap().indices
    );
}

#[test]
fn pivoted_qr_examples() {
    let a = DenseMatrix::from_diag(&[1.0, 2.0, 3.0]).unwrap();
    assert_eq!(select_pivoted_qr(&a, 2).unwrap().indices, vec![2, 1]);
    let full = select_pivoted_qr(&a, 3).unwrap();
    assert_eq!(full.indices, vec![2, 1, 0]);
    assert_eq!(full.method, SelectionMethod::PivotedQr);
    assert_eq!(full.mass, None);
}

#[test]
fn pivoted_qr_skips_duplicate_of_largest_column() {
    let a = DenseMatrix::from_columns(&[
        vec![3.0, 1.0, 0.0],
        vec![0.0, 1.0, 1.0],
        vec![3.0, 1.0, 0.0],
    ])
    .unwrap();
    let s = select_pivoted_qr(&a, 2).unwrap();
    assert_eq!(s.indices[0], 0);
    assert_eq!(s.indices[1], 1);
}

#[test]
fn exact_basis_degenerates_to_deterministic() {
    let a = random_matrix(7, 12, 31);
    let v = svd(&a).unwrap().v_k(3).unwrap();
    let direct = select_deterministic(&leverage_scores(&v, 3).unwrap(), 2.5).unwrap();
    let via = select_with_basis(&a, &v, 3, 2.5).unwrap();
    assert_eq!(via.indices, direct.indices);
    assert_eq!(via.method, SelectionMethod::ApproxBasis);

    let rot = orthonormalize(&random_matrix(3, 3, 8)).unwrap();
    let rotated = select_with_basis(&a, &v.matmul(&rot).unwrap(), 3, 2.5).unwrap();
    assert_eq!(rotated.indices, direct.indices);
}

#[test]
fn frequent_directions_selection_is_certified() {
    // Rank-3 matrix: the sketch recovers the row space exactly.
    let a = random_matrix(40, 3, 1).matmul(&random_matrix(3, 15, 2)).unwrap();
    let eps = 0.5;
    let z = frequent_directions_basis(&a, 3, eps).unwrap().z;
    let s = select_with_basis(&a, &z, 3, 3.0 - eps).unwrap();
    let v = svd(&a).unwrap().v_k(3).unwrap();
    assert!(lemma1_certificate(&v, &s).unwrap() > 1.0 - eps);
}

#[test]
fn basis_with_wrong_height_is_rejected() {
    let a = random_matrix(4, 6, 0);
    let z = orthonormalize(&random_matrix(5, 2, 0)).unwrap();
    assert!(matches!(select_with_basis(&a, &z, 2, 1.5), Err(Error::DimensionMismatch { .. })));
}

fn profile_strategy() -> impl Strategy<Value = LeverageProfile> {
    (any::<u64>(), 2usize..20, 1usize..5).prop_filter_map("k < n", |(seed, n, k)| {
        (k < n).then(|| {
            let v = orthonormalize(&random_matrix(n, k, seed)).unwrap();
            leverage_scores(&v, k).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn count_is_the_argmin_prefix(p in profile_strategy(), frac in 0.01f64..0.999) {
        let theta = frac * p.k() as f64;
        let s = select_deterministic(&p, theta).unwrap();
        let sorted = p.sorted_scores();
        let prefix = |c: usize| sorted[..c].iter().sum::<f64>();
        prop_assert!(prefix(s.c) > theta);
        if s.c > p.k() {
            prop_assert!(prefix(s.c - 1) <= theta);
        }
        prop_assert!(s.c >= p.k());
    }

    #[test]
    fn count_is_monotone_in_theta(p in profile_strategy(), a in 0.01f64..0.999, b in 0.01f64..0.999) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let k = p.k() as f64;
        let c_lo = select_deterministic(&p, lo * k).unwrap().c;
        let c_hi = select_deterministic(&p, hi * k).unwrap().c;
        prop_assert!(c_lo <= c_hi);
    }

    #[test]
    fn probabilities_sum_to_one(p in profile_strategy()) {
        let total: f64 = sampling_probabilities(&p).iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn selection_is_scale_free(seed in any::<u64>(), scale in prop_oneof![0.001f64..0.1, 10.0f64..1000.0]) {
        let a = random_matrix(6, 10, seed);
        let k = 2;
        let pick = |m: &DenseMatrix| {
            let v = svd(m).unwrap().v_k(k).unwrap();
            select_deterministic(&leverage_scores(&v, k).unwrap(), 1.5).unwrap().indices
        };
        prop_assert_eq!(pick(&a), pick(&a.scaled(scale)));
    }

    #[test]
    fn top_c_is_a_prefix_of_the_order(p in profile_strategy(), c in 1usize..20) {
        prop_assume!(c <= p.len());
        let s = select_top_c(&p, c).unwrap();
        prop_assert_eq!(&s.indices[..], &p.order()[..c]);
    }
}
