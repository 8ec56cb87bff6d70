//! Test matrices with prescribed rank-`k` leverage scores.
//!
//! `A = U·Σ·Vᵀ` where the first `k` columns of `V` have the requested
//! squared row norms, so the leverage profile of `A` is known exactly.

use rand_distr::{Distribution, Normal, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{complement_columns, dot, orthonormalize, DenseMatrix};
use crate::rng::{derive_seed, gaussian_matrix, seeded, SeededRng};

/// Absolute tolerance on `Σ targets = k`.
pub const TARGET_SUM_TOLERANCE: f64 = 1e-10;
/// Minimum relative gap `(σ_k − σ_{k+1})/σ_k` accepted for `Σ`.
pub const SPECTRAL_GAP: f64 = 1e-6;
/// Standard deviation of the paired near-uniform perturbation.
pub const NEAR_UNIFORM_SPREAD: f64 = 0.01;

/// Gaps below this are treated as already matched while rotating.
const MATCH_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    NearUniform,
    PowerLaw,
    Custom,
}

/// Everything needed to regenerate one synthetic instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub targets: Vec<f64>,
    pub seed: u64,
    pub profile_kind: ProfileKind,
}

impl SyntheticSpec {
    /// # Errors
    ///
    /// `InvalidRank` unless `1 ≤ k ≤ min(m, n)`; `InfeasibleTargets` when
    /// the targets are not a feasible row-norm profile of length `n`.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.m.min(self.n) {
            return Err(Error::InvalidRank {
                k: self.k,
                reason: format!("must lie in 1..={}", self.m.min(self.n)),
            });
        }
        if self.targets.len() != self.n {
            return Err(Error::InfeasibleTargets(format!(
                "{} targets for {} columns",
                self.targets.len(),
                self.n
            )));
        }
        check_targets(&self.targets, self.k)
    }
}

fn check_targets(targets: &[f64], k: usize) -> Result<()> {
    if k == 0 || k > targets.len() {
        return Err(Error::InfeasibleTargets(format!("k={k} for {} rows", targets.len())));
    }
    if let Some((i, t)) = targets.iter().enumerate().find(|(_, &t)| !(0.0..=1.0).contains(&t)) {
        return Err(Error::InfeasibleTargets(format!("target {t} at row {i} outside [0, 1]")));
    }
    let total: f64 = targets.iter().sum();
    if (total - k as f64).abs() > TARGET_SUM_TOLERANCE {
        return Err(Error::InfeasibleTargets(format!("targets sum to {total}, expected {k}")));
    }
    Ok(())
}

/// `n × k` matrix with orthonormal columns and squared row norms `targets`.
///
/// Uniform targets `k/n` yield a randomly rotated harmonic frame. Any other
/// feasible profile is reached from a seeded orthonormal block placed on
/// the `k` rows with the largest targets: in sorted order the current norms
/// `(1,…,1,0,…,0)` majorize the targets, and each plane rotation moves mass
/// from a row above its target to the next row below its target, landing
/// one of the two exactly. At most `n − 1` rotations are applied.
///
/// # Errors
///
/// `InfeasibleTargets` when a target leaves `[0, 1]` or the targets do not
/// sum to `k` within `1e-10`.
pub fn orthonormal_with_row_norms(targets: &[f64], k: usize, seed: u64) -> Result<DenseMatrix> {
    build_with_row_norms(targets, k, seed, None)
}

/// [`orthonormal_with_row_norms`] that also checks `‖VᵀV − I‖_max` after
/// every rotation and fails if it ever exceeds `tolerance`. Costs
/// `O(n·k²)` per rotation; meant for tests.
pub fn orthonormal_with_row_norms_checked(
    targets: &[f64],
    k: usize,
    seed: u64,
    tolerance: f64,
) -> Result<DenseMatrix> {
    build_with_row_norms(targets, k, seed, Some(tolerance))
}

fn build_with_row_norms(
    targets: &[f64],
    k: usize,
    seed: u64,
    step_check: Option<f64>,
) -> Result<DenseMatrix> {
    check_targets(targets, k)?;
    let n = targets.len();
    let mut rng = seeded(seed);
    let rotation = orthonormalize(&gaussian_matrix(k, k, &mut rng))?;

    let uniform = k as f64 / n as f64;
    if targets.iter().all(|&t| (t - uniform).abs() <= MATCH_TOLERANCE) {
        return harmonic_frame(n, k).matmul(&rotation);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| targets[b].total_cmp(&targets[a]).then(a.cmp(&b)));
    let goal: Vec<f64> = order.iter().map(|&r| targets[r]).collect();
    let mut current: Vec<f64> = (0..n).map(|p| if p < k { 1.0 } else { 0.0 }).collect();

    let mut v = DenseMatrix::zeros(n, k);
    for (p, &row) in order.iter().take(k).enumerate() {
        for j in 0..k {
            v.set(row, j, rotation.get(p, j));
        }
    }

    loop {
        // Last position still above its target, then the first one after it
        // still below; every position in between already matches.
        let Some(hi) = (0..n).rev().find(|&p| current[p] - goal[p] > MATCH_TOLERANCE) else {
            break;
        };
        let Some(lo) = (hi + 1..n).find(|&p| goal[p] - current[p] > MATCH_TOLERANCE) else {
            break;
        };
        let excess = current[hi] - goal[hi];
        let deficit = goal[lo] - current[lo];
        let pooled = current[hi] + current[lo];
        if excess <= deficit {
            rotate_to_norm(&mut v, order[hi], order[lo], goal[hi]);
            current[hi] = goal[hi];
            current[lo] = pooled - goal[hi];
        } else {
            rotate_to_norm(&mut v, order[lo], order[hi], goal[lo]);
            current[lo] = goal[lo];
            current[hi] = pooled - goal[lo];
        }
        if let Some(tol) = step_check {
            let deviation = v.orthonormality_error();
            if deviation > tol {
                return Err(Error::NotOrthonormal { deviation });
            }
        }
    }
    Ok(v)
}

/// Rotates rows `fix` and `other` in their common plane so that row `fix`
/// gets squared norm `target`. The target must lie between the two current
/// squared norms, which guarantees a real rotation angle.
fn rotate_to_norm(v: &mut DenseMatrix, fix: usize, other: usize, target: f64) {
    let x = v.row(fix).to_vec();
    let y = v.row(other).to_vec();
    let a = dot(&x, &x);
    let d = dot(&y, &y);
    let b = dot(&x, &y);
    // ‖c·x + s·y‖² = (a+d)/2 + h·cos 2φ + b·sin 2φ with h = (a−d)/2.
    let h = 0.5 * (a - d);
    let radius = h.hypot(b);
    if radius == 0.0 {
        return;
    }
    let phase = b.atan2(h);
    let cosine = ((target - 0.5 * (a + d)) / radius).clamp(-1.0, 1.0);
    let phi = 0.5 * (phase + cosine.acos());
    let (s, c) = phi.sin_cos();
    for j in 0..x.len() {
        v.set(fix, j, c * x[j] + s * y[j]);
        v.set(other, j, -s * x[j] + c * y[j]);
    }
}

/// First `k` columns of the real Fourier basis on `n` points: every row has
/// squared norm exactly `k/n` (identity when `k = n`).
fn harmonic_frame(n: usize, k: usize) -> DenseMatrix {
    if k == n {
        return DenseMatrix::identity(n);
    }
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(k);
    if k % 2 == 1 {
        columns.push(vec![(1.0 / n as f64).sqrt(); n]);
    }
    let amp = (2.0 / n as f64).sqrt();
    let mut freq = 1;
    while columns.len() < k {
        let w = 2.0 * std::f64::consts::PI * freq as f64 / n as f64;
        columns.push((0..n).map(|t| amp * (w * t as f64).cos()).collect());
        columns.push((0..n).map(|t| amp * (w * t as f64).sin()).collect());
        freq += 1;
    }
    DenseMatrix::from_columns(&columns).expect("positive size")
}

/// `n × (n − k)` orthonormal basis of the orthogonal complement of `v_k`.
///
/// # Errors
///
/// `EmptyComplement` when `k = n`; `NotOrthonormal` when `v_k` is not
/// orthonormal to `1e-8`.
pub fn complete_basis(v_k: &DenseMatrix) -> Result<DenseMatrix> {
    let (n, k) = (v_k.rows(), v_k.cols());
    if k >= n {
        return Err(Error::EmptyComplement);
    }
    let deviation = v_k.orthonormality_error();
    if deviation > crate::leverage::ORTHONORMAL_TOLERANCE {
        return Err(Error::NotOrthonormal { deviation });
    }
    Ok(complement_columns(v_k, n - k))
}

/// A generated matrix together with the factors it was built from.
#[derive(Debug, Clone)]
pub struct SyntheticInstance {
    pub a: DenseMatrix,
    /// The prescribed `n × k` block of right singular vectors.
    pub v_k: DenseMatrix,
    /// The `min(m, n)` singular values, descending.
    pub sigma: Vec<f64>,
}

/// `A = U·Σ·Vᵀ` for `spec`; see [`generate`].
pub fn assemble_matrix(spec: &SyntheticSpec) -> Result<DenseMatrix> {
    generate(spec).map(|inst| inst.a)
}

/// Builds `V = [V_k V_k^⊥]`, `U` from a Gaussian `m × min(m, n)` matrix and
/// `Σ` from sorted absolute Gaussians (redrawn while the relative gap after
/// `σ_k` is below `1e-6`). Only the first `min(m, n)` columns of `V` meet a
/// nonzero singular value, so only those are formed.
///
/// # Errors
///
/// Those of [`SyntheticSpec::validate`].
pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticInstance> {
    spec.validate()?;
    let (m, n, k) = (spec.m, spec.n, spec.k);
    let p = m.min(n);

    let v_k = orthonormal_with_row_norms(&spec.targets, k, derive_seed(spec.seed, &[0]))?;
    let v = if p > k {
        let extra = complement_columns(&v_k, p - k);
        let mut cols = v_k.to_columns();
        cols.extend(extra.to_columns());
        DenseMatrix::from_columns(&cols)?
    } else {
        v_k.clone()
    };

    let mut u_rng = seeded(derive_seed(spec.seed, &[1]));
    let u = orthonormalize(&gaussian_matrix(m, p, &mut u_rng))?;
    let sigma = draw_spectrum(p, k, &mut seeded(derive_seed(spec.seed, &[2])));

    let mut us = u;
    for i in 0..m {
        for (j, &s) in sigma.iter().enumerate() {
            let val = us.get(i, j) * s;
            us.set(i, j, val);
        }
    }
    let a = us.matmul(&v.transpose())?;
    Ok(SyntheticInstance { a, v_k, sigma })
}

fn draw_spectrum(p: usize, k: usize, rng: &mut SeededRng) -> Vec<f64> {
    loop {
        let mut sigma: Vec<f64> = (0..p)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                z.abs()
            })
            .collect();
        sigma.sort_by(|a, b| b.total_cmp(a));
        let positive = sigma[p - 1] > 0.0;
        let gapped = k >= p || (sigma[k - 1] - sigma[k]) >= SPECTRAL_GAP * sigma[k - 1];
        if positive && gapped {
            return sigma;
        }
    }
}

/// Targets `k/n` with disjoint consecutive pairs `(0,1), (2,3), …` moved by
/// `±β`, `β ~ N(0, 0.01²)`, redrawn until both entries stay in `[0, 1]`.
/// With odd `n` the last entry stays at `k/n`.
///
/// # Errors
///
/// `Infeasible` unless `1 ≤ k < n`.
pub fn near_uniform_targets(n: usize, k: usize, seed: u64) -> Result<Vec<f64>> {
    if k == 0 || k >= n {
        return Err(Error::Infeasible(format!("near-uniform profile needs 1 <= k < n, got k={k}, n={n}")));
    }
    let base = k as f64 / n as f64;
    let normal = Normal::new(0.0, NEAR_UNIFORM_SPREAD).expect("valid spread");
    let mut rng = seeded(seed);
    let mut targets = vec![base; n];
    for pair in targets.chunks_exact_mut(2) {
        let beta = loop {
            let beta = normal.sample(&mut rng);
            let (up, down) = (base + beta, base - beta);
            if (0.0..=1.0).contains(&up) && (0.0..=1.0).contains(&down) {
                break beta;
            }
        };
        pair[0] = base + beta;
        pair[1] = base - beta;
    }
    Ok(targets)
}

/// Power-law targets and whether the raw profile had to be capped.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerLawTargets {
    pub targets: Vec<f64>,
    pub capped: bool,
    /// `k / Σ_i i^{−α}`, the leading score before capping.
    pub raw_leading: f64,
    /// Number of leading entries pinned at 1.
    pub pinned: usize,
}

/// Profile `ℓ_i = ℓ_1·i^{−α}` summing to `k`.
///
/// When `ℓ_1 > 1`, the fewest leading entries are pinned at 1 such that the
/// rescaled tail `(k − p)·i^{−α} / Σ_{j>p} j^{−α}` stays at or below 1.
///
/// # Errors
///
/// `Infeasible` unless `1 ≤ k < n` and `α > 0` is finite.
pub fn power_law_targets(n: usize, k: usize, alpha: f64) -> Result<PowerLawTargets> {
    if k == 0 || k >= n {
        return Err(Error::Infeasible(format!("power-law profile needs 1 <= k < n, got k={k}, n={n}")));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Infeasible(format!("exponent {alpha} must be positive")));
    }
    let weights: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-alpha)).collect();
    // tail[p] = Σ_{i ≥ p} weights[i], accumulated from the small end.
    let mut tail = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + weights[i];
    }
    let raw_leading = k as f64 / tail[0];
    let mut pinned = 0;
    while (k - pinned) as f64 * weights[pinned] / tail[pinned] > 1.0 {
        pinned += 1;
    }
    let scale = (k - pinned) as f64 / tail[pinned];
    let targets = (0..n)
        .map(|i| if i < pinned { 1.0 } else { (scale * weights[i]).min(1.0) })
        .collect();
    Ok(PowerLawTargets { targets, capped: pinned > 0, raw_leading, pinned })
}
