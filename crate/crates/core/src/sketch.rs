//! Approximate top-`k` right bases `Z` that stand in for `V_k`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{orthonormalize, svd, DenseMatrix};
use crate::rng::{gaussian_matrix, seeded};

/// Rangefinder oversampling `p`.
pub const OVERSAMPLING: usize = 10;
/// Upper bound on rangefinder power iterations.
pub const MAX_POWER_ITERATIONS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisKind {
    Exact,
    FrequentDirections,
    Rangefinder,
}

/// An `n × k` basis with orthonormal columns and its provenance.
#[derive(Debug, Clone, Serialize)]
pub struct BasisArtifact {
    #[serde(skip)]
    pub z: DenseMatrix,
    pub kind: BasisKind,
    /// Accuracy parameter; `0` for the exact basis.
    pub epsilon: f64,
    pub seed: Option<u64>,
}

/// Top-`k` right singular vectors of `a`.
///
/// # Errors
///
/// `RankDeficient` when `k` exceeds the numerical rank, `InvalidRank` for
/// `k = 0`, `ZeroMatrix` for a zero `a`.
pub fn exact_basis(a: &DenseMatrix, k: usize) -> Result<BasisArtifact> {
    if k == 0 {
        return Err(Error::InvalidRank { k, reason: "must be at least 1".into() });
    }
    let z = top_right_vectors(a, k)?;
    Ok(BasisArtifact { z, kind: BasisKind::Exact, epsilon: 0.0, seed: None })
}

fn top_right_vectors(a: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
    let f = svd(a)?;
    f.v_k(k).ok_or(Error::RankDeficient { k, rank: f.rank() })
}

/// Sketch height `⌈k + k/ε⌉`.
pub fn sketch_height(k: usize, epsilon: f64) -> usize {
    k + (k as f64 / epsilon).ceil() as usize
}

/// Frequent Directions over the rows of `a`, sketch height `ℓ = ⌈k + k/ε⌉`.
///
/// The buffer holds `2ℓ` rows; when full it is rotated onto its right
/// singular basis and every squared singular value is reduced by `σ_ℓ²`,
/// which empties the lower half. `Z` is the re-orthonormalized top-`k`
/// right singular basis of the final sketch, and satisfies
/// `‖A − AZZᵀ‖_F² ≤ (1 + ε)·‖A − A_k‖_F²`. When `ℓ ≥ m` the sketch would
/// hold `A` itself, so the exact basis is returned.
///
/// # Errors
///
/// `InvalidEpsilon` unless `0 < ε ≤ 1`; `InvalidRank` unless
/// `1 ≤ k ≤ min(m, n)`; `RankDeficient` when the sketch has rank below `k`.
pub fn frequent_directions_basis(
    a: &DenseMatrix,
    k: usize,
    epsilon: f64,
) -> Result<BasisArtifact> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    check_rank_parameter(a, k, 1)?;
    let ell = sketch_height(k, epsilon);
    let artifact = |z| BasisArtifact { z, kind: BasisKind::FrequentDirections, epsilon, seed: None };
    if ell >= a.rows() {
        return Ok(artifact(top_right_vectors(a, k)?));
    }

    let n = a.cols();
    let capacity = 2 * ell;
    let mut sketch: Vec<f64> = Vec::with_capacity(capacity * n);
    for i in 0..a.rows() {
        sketch.extend_from_slice(a.row(i));
        if sketch.len() == capacity * n {
            sketch = shrink(sketch, n, ell)?;
        }
    }
    let b = DenseMatrix::new(sketch.len() / n, n, sketch)?;
    let z = top_right_vectors(&b, k)?;
    Ok(artifact(orthonormalize(&z)?))
}

/// One Frequent Directions reduction of a full `2ℓ × n` buffer.
fn shrink(rows: Vec<f64>, n: usize, ell: usize) -> Result<Vec<f64>> {
    let b = DenseMatrix::new(rows.len() / n, n, rows)?;
    let f = match svd(&b) {
        Ok(f) => f,
        Err(Error::ZeroMatrix) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    let delta = f.sigma.get(ell - 1).map_or(0.0, |s| s * s);
    let mut out = Vec::with_capacity(ell * n);
    for (t, &s) in f.sigma.iter().enumerate() {
        let shrunk = (s * s - delta).max(0.0).sqrt();
        if shrunk == 0.0 {
            break;
        }
        out.extend((0..n).map(|j| shrunk * f.v.get(j, t)));
    }
    Ok(out)
}

/// Power iterations `⌈ln(min(m, n)/k)/ε⌉`, clamped to `[0, 20]`.
pub fn power_iterations(m: usize, n: usize, k: usize, epsilon: f64) -> usize {
    let q = ((m.min(n) as f64 / k as f64).ln() / epsilon).ceil();
    q.clamp(0.0, MAX_POWER_ITERATIONS as f64) as usize
}

/// Randomized subspace iteration with a Gaussian test matrix of `k + 10`
/// columns and [`power_iterations`] rounds, re-orthonormalizing after every
/// multiplication. `Z` is the top-`k` right singular basis of `QᵀA`.
/// In expectation `‖A − AZZᵀ‖_2 ≤ (√2 + ε)·σ_{k+1}`.
///
/// # Errors
///
/// `InvalidEpsilon` unless `0 < ε < 1`; `InvalidRank` unless
/// `2 ≤ k ≤ min(m, n)`; `RankDeficient` when the captured range has rank
/// below `k`.
pub fn rangefinder_basis(
    a: &DenseMatrix,
    k: usize,
    epsilon: f64,
    seed: u64,
) -> Result<BasisArtifact> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    check_rank_parameter(a, k, 2)?;
    let (m, n) = (a.rows(), a.cols());
    let width = (k + OVERSAMPLING).min(m.min(n));
    let omega = gaussian_matrix(n, width, &mut seeded(seed));
    let mut q = orthonormalize(&a.matmul(&omega)?)?;
    for _ in 0..power_iterations(m, n, k, epsilon) {
        let w = orthonormalize(&a.t_matmul(&q)?)?;
        q = orthonormalize(&a.matmul(&w)?)?;
    }
    let b = q.t_matmul(a)?;
    let z = top_right_vectors(&b, k)?;
    Ok(BasisArtifact { z, kind: BasisKind::Rangefinder, epsilon, seed: Some(seed) })
}

fn check_rank_parameter(a: &DenseMatrix, k: usize, min_k: usize) -> Result<()> {
    let limit = a.rows().min(a.cols());
    if k < min_k || k > limit {
        return Err(Error::InvalidRank { k, reason: format!("must lie in {min_k}..={limit}") });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_basis_of_diagonal() {
        let a = DenseMatrix::from_diag(&[3.0, 2.0, 1.0]).unwrap();
        let b = exact_basis(&a, 2).unwrap();
        assert!((b.z.get(0, 0).abs() - 1.0).abs() < 1e-15);
        assert!((b.z.get(1, 1).abs() - 1.0).abs() < 1e-15);
        assert!(b.z.get(2, 0).abs() < 1e-15 && b.z.get(2, 1).abs() < 1e-15);
        assert!(matches!(exact_basis(&a, 4), Err(Error::RankDeficient { k: 4, rank: 3 })));
    }

    #[test]
    fn sketch_height_matches_formula() {
        assert_eq!(sketch_height(5, 0.5), 15);
        assert_eq!(sketch_height(5, 1.0), 10);
        assert_eq!(sketch_height(3, 0.3), 13);
    }

    #[test]
    fn power_iteration_count() {
        assert_eq!(power_iterations(80, 50, 5, 0.5), 5);
        assert_eq!(power_iterations(80, 50, 50, 0.5), 0);
        assert_eq!(power_iterations(10_000, 10_000, 2, 0.01), MAX_POWER_ITERATIONS);
    }

    #[test]
    fn parameter_ranges_are_checked() {
        let a = DenseMatrix::identity(4);
        assert!(matches!(frequent_directions_basis(&a, 2, 0.0), Err(Error::InvalidEpsilon(_))));
        assert!(matches!(frequent_directions_basis(&a, 5, 0.5), Err(Error::InvalidRank { .. })));
        assert!(matches!(rangefinder_basis(&a, 1, 0.5, 0), Err(Error::InvalidRank { .. })));
        assert!(matches!(rangefinder_basis(&a, 2, 1.0, 0), Err(Error::InvalidEpsilon(_))));
    }
}
