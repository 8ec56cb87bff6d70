//! Column selection: deterministic leverage-score sampling and its baselines.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::leverage::{leverage_scores, LeverageProfile};
use crate::matrix::{pivoted_qr, DenseMatrix};
use crate::rng::seeded;

/// Which selector produced a [`SelectionResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMethod {
    DeterministicLeverage,
    RandomizedLeverage,
    PivotedQr,
    ApproxBasis,
}

impl SelectionMethod {
    pub const ALL: [SelectionMethod; 4] = [
        Self::DeterministicLeverage,
        Self::RandomizedLeverage,
        Self::PivotedQr,
        Self::ApproxBasis,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::DeterministicLeverage => "deterministic-leverage",
            Self::RandomizedLeverage => "randomized-leverage",
            Self::PivotedQr => "pivoted-qr",
            Self::ApproxBasis => "approx-basis",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.tag() == tag)
    }
}

impl std::fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Selected columns `C = A·S`.
///
/// `indices` are 0-based and ordered as selected; randomized selection may
/// repeat an index. `mass` is the total score of the distinct selected
/// columns when a profile was involved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionResult {
    pub indices: Vec<usize>,
    pub c: usize,
    pub mass: Option<f64>,
    pub method: SelectionMethod,
    pub seed: Option<u64>,
    pub theta: Option<f64>,
}

impl SelectionResult {
    /// Distinct indices in first-occurrence order.
    pub fn distinct_indices(&self) -> Vec<usize> {
        let mut seen = std::collections::HashSet::new();
        self.indices.iter().copied().filter(|i| seen.insert(*i)).collect()
    }
}

/// `θ = k − ε`, the threshold that ties the column count to the error
/// factor `1/(1 − ε)`.
///
/// # Errors
///
/// `InvalidEpsilon` unless `0 < ε < k`.
pub fn theta_for_epsilon(k: usize, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < k as f64) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    Ok(k as f64 - epsilon)
}

/// Deterministic leverage-score sampling.
///
/// Takes the smallest `c` whose top-`c` score sum strictly exceeds `theta`,
/// raises it to `k` if smaller, and returns the first `c` columns of the
/// profile order.
///
/// # Errors
///
/// `InvalidThreshold` for non-positive or non-finite `theta`;
/// `InfeasibleThreshold` when `theta ≥ k` or no prefix exceeds it.
///
/// # Examples
///
/// ```
/// use detlev::{select_deterministic, LeverageProfile};
/// let p = LeverageProfile::from_scores(2, vec![0.9, 0.5, 0.3, 0.3]).unwrap();
/// let s = select_deterministic(&p, 0.8).unwrap();
/// assert_eq!(s.indices, vec![0, 1]);
/// ```
pub fn select_deterministic(profile: &LeverageProfile, theta: f64) -> Result<SelectionResult> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(Error::InvalidThreshold(theta));
    }
    let k = profile.k();
    let total: f64 = profile.scores().iter().sum();
    if theta >= k as f64 {
        return Err(Error::InfeasibleThreshold { theta, total });
    }
    let mut prefix = 0.0;
    let mut stop = None;
    for (count, &i) in profile.order().iter().enumerate() {
        prefix += profile.scores()[i];
        if prefix > theta {
            stop = Some(count + 1);
            break;
        }
    }
    let c = stop.ok_or(Error::InfeasibleThreshold { theta, total })?.max(k);
    let mut result = top_columns(profile, c, SelectionMethod::DeterministicLeverage);
    result.theta = Some(theta);
    Ok(result)
}

/// The first `c` columns of the profile order: the deterministic selector
/// at a fixed count, as swept in the synthetic experiments.
///
/// # Errors
///
/// `InvalidColumnCount` unless `1 ≤ c ≤ n`.
pub fn select_top_c(profile: &LeverageProfile, c: usize) -> Result<SelectionResult> {
    if c == 0 || c > profile.len() {
        return Err(Error::InvalidColumnCount { c, n: profile.len() });
    }
    Ok(top_columns(profile, c, SelectionMethod::DeterministicLeverage))
}

fn top_columns(profile: &LeverageProfile, c: usize, method: SelectionMethod) -> SelectionResult {
    let indices = profile.order()[..c].to_vec();
    let mass = profile.mass_of(&indices);
    SelectionResult { indices, c, mass: Some(mass), method, seed: None, theta: None }
}

/// Sampling distribution `p_i = ℓ_i / k` of the randomized baseline.
pub fn sampling_probabilities(profile: &LeverageProfile) -> Vec<f64> {
    let k = profile.k() as f64;
    profile.scores().iter().map(|s| s / k).collect()
}

/// `c` i.i.d. draws with replacement from `p_i = ℓ_i / k`, reproducible
/// from `seed`.
///
/// # Errors
///
/// `InvalidColumnCount` when `c = 0`.
pub fn select_randomized(
    profile: &LeverageProfile,
    c: usize,
    seed: u64,
) -> Result<SelectionResult> {
    if c == 0 {
        return Err(Error::InvalidColumnCount { c, n: profile.len() });
    }
    let weights = sampling_probabilities(profile);
    let dist = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidProfile(format!("cannot sample: {e}")))?;
    let mut rng = seeded(seed);
    let indices: Vec<usize> = (0..c).map(|_| dist.sample(&mut rng)).collect();
    let mass = profile.mass_of(&indices);
    Ok(SelectionResult {
        indices,
        c,
        mass: Some(mass),
        method: SelectionMethod::RandomizedLeverage,
        seed: Some(seed),
        theta: None,
    })
}

/// First `c` pivots of column-pivoted QR on `a`.
///
/// Pivoting stops after `min(m, n)` steps; when `c` exceeds that, the
/// remaining columns follow in their final pivot order.
///
/// # Errors
///
/// `InvalidColumnCount` unless `1 ≤ c ≤ n`; `ZeroMatrix` for a zero `a`.
pub fn select_pivoted_qr(a: &DenseMatrix, c: usize) -> Result<SelectionResult> {
    if c == 0 || c > a.cols() {
        return Err(Error::InvalidColumnCount { c, n: a.cols() });
    }
    let f = pivoted_qr(a)?;
    Ok(SelectionResult {
        indices: f.perm[..c].to_vec(),
        c,
        mass: None,
        method: SelectionMethod::PivotedQr,
        seed: None,
        theta: None,
    })
}

/// Deterministic selection driven by an approximate basis `z` (`n × k`,
/// orthonormal columns) in place of `V_k`.
///
/// # Errors
///
/// `DimensionMismatch` when `z` has other than `n` rows; otherwise the
/// errors of [`leverage_scores`] and [`select_deterministic`].
pub fn select_with_basis(
    a: &DenseMatrix,
    z: &DenseMatrix,
    k: usize,
    theta: f64,
) -> Result<SelectionResult> {
    if z.rows() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: format!("basis with {} rows", a.cols()),
            found: format!("{} rows", z.rows()),
        });
    }
    let profile = leverage_scores(z, k)?;
    let mut result = select_deterministic(&profile, theta)?;
    result.method = SelectionMethod::ApproxBasis;
    Ok(result)
}
