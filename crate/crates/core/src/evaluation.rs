//! Residual errors, the rank-preservation certificate, the restricted
//! rank-`k` projection and closed-form column-count bounds.
//!
//! Ratios in [`ErrorReport`] are unsquared, `‖A − CC⁺A‖ / ‖A − A_k‖`. The
//! guarantees of the deterministic selector bound their squares:
//! `ratio² < 1/(1 − ε)` at `θ = k − ε`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{
    best_rank_k_errors, orthonormal_basis, projection_residual, spectral_norm, svd, DenseMatrix,
    SvdFactors,
};
use crate::selectors::SelectionResult;

/// Errors of the best rank-`k` approximation `A_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceErrors {
    pub k: usize,
    /// `σ_{k+1}`, or 0 when `k ≥ rank`.
    pub spectral: f64,
    /// `sqrt(Σ_{i>k} σ_i²)`.
    pub frobenius: f64,
    pub rank: usize,
    /// `σ_k`, or 0 when `k > rank`.
    pub sigma_k: f64,
}

impl ReferenceErrors {
    pub fn from_svd(f: &SvdFactors, k: usize) -> Self {
        let (spectral, frobenius) = best_rank_k_errors(f, k);
        let sigma_k = k.checked_sub(1).and_then(|i| f.sigma.get(i)).copied().unwrap_or(0.0);
        Self { k, spectral, frobenius, rank: f.rank(), sigma_k }
    }

    /// # Errors
    ///
    /// `ZeroMatrix` for a zero `a`.
    pub fn of(a: &DenseMatrix, k: usize) -> Result<Self> {
        Ok(Self::from_svd(&svd(a)?, k))
    }

    /// `k ≥ rank`: `A_k = A` and relative errors are undefined.
    pub fn rank_saturated(&self) -> bool {
        self.k >= self.rank
    }
}

/// Absolute and relative residual errors of one column selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub spectral_abs: f64,
    pub frobenius_abs: f64,
    pub spectral_ref: f64,
    pub frobenius_ref: f64,
    /// `spectral_abs / spectral_ref`, present iff the reference is positive.
    pub spectral_ratio: Option<f64>,
    /// `frobenius_abs / frobenius_ref`, present iff the reference is positive.
    pub frobenius_ratio: Option<f64>,
    /// Distinct selected columns.
    pub c: usize,
    pub k: usize,
    /// Set when `k ≥ rank(A)`.
    pub rank_saturated: bool,
}

impl ErrorReport {
    fn from_residual(residual: &DenseMatrix, c: usize, reference: &ReferenceErrors) -> Self {
        let frobenius_abs = residual.frobenius_norm();
        // Lanczos can overshoot ‖R‖_F by an ulp when R has rank one.
        let spectral_abs = spectral_norm(residual).min(frobenius_abs);
        let ratio = |abs: f64, r: f64| (r > 0.0).then(|| abs / r);
        Self {
            spectral_abs,
            frobenius_abs,
            spectral_ref: reference.spectral,
            frobenius_ref: reference.frobenius,
            spectral_ratio: ratio(spectral_abs, reference.spectral),
            frobenius_ratio: ratio(frobenius_abs, reference.frobenius),
            c,
            k: reference.k,
            rank_saturated: reference.rank_saturated(),
        }
    }
}

fn checked_distinct(selection: &SelectionResult, n: usize) -> Result<Vec<usize>> {
    let distinct = selection.distinct_indices();
    if distinct.is_empty() {
        return Err(Error::InvalidColumnCount { c: 0, n });
    }
    if let Some(&bad) = distinct.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    Ok(distinct)
}

/// `‖A − CC⁺A‖` in both norms for the distinct selected columns, against
/// the best rank-`k` errors.
///
/// # Errors
///
/// `IndexOutOfRange` for an invalid index, `ZeroMatrix` for a zero `a`.
pub fn error_report(a: &DenseMatrix, selection: &SelectionResult, k: usize) -> Result<ErrorReport> {
    error_report_with(a, selection, &ReferenceErrors::of(a, k)?)
}

/// [`error_report`] with precomputed reference errors, for sweeps that
/// evaluate many selections of the same matrix.
pub fn error_report_with(
    a: &DenseMatrix,
    selection: &SelectionResult,
    reference: &ReferenceErrors,
) -> Result<ErrorReport> {
    let distinct = checked_distinct(selection, a.cols())?;
    let c = a.select_columns(&distinct)?;
    let residual = projection_residual(a, &c)?;
    Ok(ErrorReport::from_residual(&residual, distinct.len(), reference))
}

/// `σ_k²(V_kᵀS)` over the distinct selected rows of `v_k`; 0 when fewer
/// than `k` rows are selected or they have rank below `k`. At `θ = k − ε`
/// it exceeds `1 − ε`, and `ratio² ≤ 1/certificate` in both norms.
///
/// # Errors
///
/// `IndexOutOfRange` for an invalid index.
pub fn lemma1_certificate(v_k: &DenseMatrix, selection: &SelectionResult) -> Result<f64> {
    let k = v_k.cols();
    let distinct = checked_distinct(selection, v_k.rows())?;
    if distinct.len() < k {
        return Ok(0.0);
    }
    let rows = v_k.select_rows(&distinct)?;
    match svd(&rows) {
        Ok(f) if f.rank() >= k => Ok(f.sigma[k - 1] * f.sigma[k - 1]),
        Ok(_) | Err(Error::ZeroMatrix) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Whether `V_kᵀS` has numerical rank `k`, counting singular values above
/// `tol·σ_1`.
///
/// # Errors
///
/// `IndexOutOfRange` for an invalid index.
pub fn check_rank_preservation(
    v_k: &DenseMatrix,
    selection: &SelectionResult,
    tol: f64,
) -> Result<bool> {
    let k = v_k.cols();
    let distinct = checked_distinct(selection, v_k.rows())?;
    if distinct.len() < k {
        return Ok(false);
    }
    let rows = v_k.select_rows(&distinct)?;
    match svd(&rows) {
        Ok(f) => Ok(f.sigma.iter().filter(|&&s| s > tol * f.sigma[0]).count() == k),
        Err(Error::ZeroMatrix) => Ok(false),
        Err(e) => Err(e),
    }
}

/// `Q·(QᵀA)_k` for `Q` an orthonormal basis of the selected columns: the
/// Frobenius-optimal rank-`k` approximation inside `span(C)`, and within
/// `√2` of the spectral optimum there.
///
/// # Errors
///
/// `InvalidRank` when `k` exceeds the number of distinct selected columns
/// or is zero; `IndexOutOfRange` for an invalid index.
pub fn restricted_rank_k(
    a: &DenseMatrix,
    selection: &SelectionResult,
    k: usize,
) -> Result<(DenseMatrix, ErrorReport)> {
    restricted_rank_k_with(a, selection, &ReferenceErrors::of(a, k)?)
}

/// [`restricted_rank_k`] with precomputed reference errors.
pub fn restricted_rank_k_with(
    a: &DenseMatrix,
    selection: &SelectionResult,
    reference: &ReferenceErrors,
) -> Result<(DenseMatrix, ErrorReport)> {
    let k = reference.k;
    let distinct = checked_distinct(selection, a.cols())?;
    if k == 0 || k > distinct.len() {
        return Err(Error::InvalidRank {
            k,
            reason: format!("must lie in 1..={} (distinct selected columns)", distinct.len()),
        });
    }
    let c = a.select_columns(&distinct)?;
    let approx = match orthonormal_basis(&c) {
        None => DenseMatrix::zeros(a.rows(), a.cols()),
        Some(q) => {
            let coeffs = q.t_matmul(a)?;
            match svd(&coeffs) {
                Ok(f) => q.matmul(&f.truncated(k))?,
                Err(Error::ZeroMatrix) => DenseMatrix::zeros(a.rows(), a.cols()),
                Err(e) => return Err(e),
            }
        }
    };
    let residual = a.sub(&approx)?;
    let report = ErrorReport::from_residual(&residual, distinct.len(), reference);
    Ok((approx, report))
}

/// `1/(1 − ε)`.
///
/// # Errors
///
/// `InvalidEpsilon` unless `0 < ε < 1`.
pub fn theorem1_factor(epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    Ok(1.0 / (1.0 - epsilon))
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// Ceiling that ignores floating-point noise just above an integer.
fn ceil_count(x: f64) -> usize {
    if x >= usize::MAX as f64 {
        return usize::MAX;
    }
    (x - 1e-9 * x.abs().max(1.0)).ceil().max(0.0) as usize
}

/// Column count sufficient at `θ = k − ε` when the scores decay as
/// `i^{−(1+η)}`: `⌈max{(2k/ε)^{1/(1+η)} − 1, (2k/(ηε))^{1/η} − 1, k}⌉`.
/// Saturates at `usize::MAX` for tiny `η`.
///
/// # Errors
///
/// `InvalidEpsilon` unless `0 < ε < 1`; `InvalidRank` for `k = 0`;
/// `Infeasible` unless `η > 0` is finite.
pub fn theorem2_column_bound(k: usize, epsilon: f64, eta: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    if k == 0 {
        return Err(Error::InvalidRank { k, reason: "must be at least 1".into() });
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::Infeasible(format!("decay excess eta={eta} must be positive")));
    }
    let kf = k as f64;
    let first = (2.0 * kf / epsilon).powf(1.0 / (1.0 + eta)) - 1.0;
    let second = (2.0 * kf / (eta * epsilon)).powf(1.0 / eta) - 1.0;
    Ok(ceil_count(first.max(second).max(kf)))
}

/// Column counts of the deterministic bound and the two reference
/// algorithms at one `(k, ε, η)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub k: usize,
    pub epsilon: f64,
    pub eta: f64,
    pub theorem1_factor: f64,
    pub theorem2_c: usize,
    /// `⌈k·ln k/ε²⌉` with the unspecified constant set to 1; at least 1.
    pub dmm08_c: usize,
    /// `⌈2k/ε⌉`.
    pub bdm11a_c: usize,
}

/// Fills a [`BoundReport`].
///
/// # Errors
///
/// Those of [`theorem2_column_bound`].
pub fn comparison_counts(k: usize, epsilon: f64, eta: f64) -> Result<BoundReport> {
    let theorem2_c = theorem2_column_bound(k, epsilon, eta)?;
    let kf = k as f64;
    Ok(BoundReport {
        k,
        epsilon,
        eta,
        theorem1_factor: theorem1_factor(epsilon)?,
        theorem2_c,
        dmm08_c: ceil_count(kf * kf.ln() / (epsilon * epsilon)).max(1),
        bdm11a_c: ceil_count(2.0 * kf / epsilon).max(1),
    })
}
