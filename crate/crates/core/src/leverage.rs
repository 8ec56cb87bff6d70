//! Rank-`k` leverage scores and power-law fits of their decay.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Tolerance on `‖V_kᵀV_k − I‖_max` accepted as orthonormal.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-8;

/// Number of top scores fitted when the caller has no preference.
pub const DEFAULT_TOP_T: usize = 1000;

/// Leverage scores `ℓ_i = ‖[V_k]_{i,:}‖²` with their descending order.
///
/// Invariants: `0 ≤ ℓ_i ≤ 1 + 1e-10`, `|Σ ℓ_i − k| ≤ 1e-8·k`, and `order`
/// sorts scores descending with ties broken by ascending index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeverageProfile {
    k: usize,
    scores: Vec<f64>,
    order: Vec<usize>,
}

impl LeverageProfile {
    /// Validates raw scores against the profile invariants.
    ///
    /// # Errors
    ///
    /// `InvalidProfile` when a score leaves `[0, 1 + 1e-10]`, the total
    /// differs from `k` by more than `1e-8·k`, or `k` is zero or exceeds the
    /// column count.
    pub fn from_scores(k: usize, scores: Vec<f64>) -> Result<Self> {
        if k == 0 || k > scores.len() {
            return Err(Error::InvalidProfile(format!(
                "k={k} must lie in 1..={}",
                scores.len()
            )));
        }
        if let Some((i, s)) =
            scores.iter().enumerate().find(|(_, &s)| !(0.0..=1.0 + 1e-10).contains(&s))
        {
            return Err(Error::InvalidProfile(format!("score {s} at column {i} outside [0, 1]")));
        }
        let total: f64 = scores.iter().sum();
        if (total - k as f64).abs() > 1e-8 * k as f64 {
            return Err(Error::InvalidProfile(format!("scores sum to {total}, expected {k}")));
        }
        let order = descending_order(&scores);
        Ok(Self { k, scores, order })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of columns `n`.
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Scores indexed by column (0-based).
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Column indices (0-based) sorted by descending score.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Scores in descending order.
    pub fn sorted_scores(&self) -> Vec<f64> {
        self.order.iter().map(|&i| self.scores[i]).collect()
    }

    /// Total score of the listed columns, each distinct column counted once.
    pub fn mass_of(&self, indices: &[usize]) -> f64 {
        let mut seen = vec![false; self.scores.len()];
        indices
            .iter()
            .filter(|&&i| !std::mem::replace(&mut seen[i], true))
            .map(|&i| self.scores[i])
            .sum()
    }
}

/// Squared row norms of `v_k`, an `n × k` matrix with orthonormal columns.
///
/// # Errors
///
/// `DimensionMismatch` when `v_k` does not have `k` columns,
/// `NotOrthonormal` when `‖V_kᵀV_k − I‖_max > 1e-8`.
///
/// # Examples
///
/// ```
/// use detlev::{leverage_scores, DenseMatrix};
/// let v = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
/// let p = leverage_scores(&v, 2).unwrap();
/// assert_eq!(p.scores(), &[1.0, 1.0, 0.0]);
/// ```
pub fn leverage_scores(v_k: &DenseMatrix, k: usize) -> Result<LeverageProfile> {
    if v_k.cols() != k {
        return Err(Error::DimensionMismatch {
            expected: format!("{k} columns"),
            found: format!("{} columns", v_k.cols()),
        });
    }
    let deviation = v_k.orthonormality_error();
    if deviation > ORTHONORMAL_TOLERANCE {
        return Err(Error::NotOrthonormal { deviation });
    }
    let scores = v_k.row_norms_squared();
    let order = descending_order(&scores);
    Ok(LeverageProfile { k, scores, order })
}

fn descending_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// Least-squares fit of `log ℓ_(i) = log β − α·log i` over the top scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub beta: f64,
    /// Coefficient of determination in log-log space, in `[0, 1]`.
    pub r_squared: f64,
    /// Number of scores used, `T ≥ 2`.
    pub fitted_count: usize,
}

/// `min(n, 1000)`.
pub fn default_top_t(n: usize) -> usize {
    n.min(DEFAULT_TOP_T)
}

/// Fits `β·i^{−α}` to the `top_t` largest positive scores of `profile`.
///
/// # Errors
///
/// `InsufficientData` when fewer than two of the top scores are positive.
pub fn fit_power_law(profile: &LeverageProfile, top_t: usize) -> Result<PowerLawFit> {
    fit_power_law_scores(&profile.sorted_scores(), top_t)
}

/// [`fit_power_law`] on an arbitrary score list; the list is sorted
/// descending first, zeros and negatives are excluded.
pub fn fit_power_law_scores(scores: &[f64], top_t: usize) -> Result<PowerLawFit> {
    let mut sorted: Vec<f64> = scores.iter().copied().filter(|&s| s > 0.0).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted.truncate(top_t);
    let t = sorted.len();
    if t < 2 {
        return Err(Error::InsufficientData { found: t });
    }

    let xs: Vec<f64> = (1..=t).map(|i| (i as f64).ln()).collect();
    let ys: Vec<f64> = sorted.iter().map(|s| s.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / t as f64;
    let y_mean = ys.iter().sum::<f64>() / t as f64;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let scale = ys.iter().map(|y| y * y).sum::<f64>().max(1.0);
    let r_squared = if ss_tot <= 1e-28 * scale {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };

    Ok(PowerLawFit { alpha: 0.0 - slope, beta: intercept.exp(), r_squared, fitted_count: t })
}
