use super::{axpy, dot, norm2, DenseMatrix};

/// Successive Ritz values closer than this (relative) count as converged.
const RITZ_TOLERANCE: f64 = 1e-14;

/// Largest singular value `σ_1(a)`, by Lanczos on the smaller Gram operator.
///
/// Iterates until two consecutive Rayleigh–Ritz estimates of `σ_1²` agree to
/// `1e-14` relative, the Krylov space becomes invariant, or it fills the
/// whole space. Uses full reorthogonalization and a fixed start vector, so
/// the result is deterministic.
pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return 0.0;
    }
    // Scaling keeps the Gram entries well inside the exponent range.
    let scaled = a.scaled(1.0 / fro);
    let wide = scaled.rows() <= scaled.cols();
    let dim = if wide { scaled.rows() } else { scaled.cols() };
    let apply = |x: &[f64]| -> Vec<f64> {
        if wide {
            scaled.matvec(&scaled.t_matvec(x))
        } else {
            scaled.t_matvec(&scaled.matvec(x))
        }
    };

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut q = start_vector(dim);
    let mut previous = 0.0_f64;
    let mut calm_steps = 0;

    loop {
        let mut w = apply(&q);
        let alpha = dot(&q, &w);
        axpy(-alpha, &q, &mut w);
        if let (Some(prev), Some(&beta)) = (basis.last(), betas.last()) {
            axpy(-beta, prev, &mut w);
        }
        basis.push(q);
        alphas.push(alpha);
        for _ in 0..2 {
            for b in &basis {
                let h = dot(b, &w);
                axpy(-h, b, &mut w);
            }
        }

        let ritz = largest_tridiagonal_eigenvalue(&alphas, &betas);
        if (ritz - previous).abs() <= RITZ_TOLERANCE * ritz {
            calm_steps += 1;
        } else {
            calm_steps = 0;
        }
        previous = ritz;

        let beta = norm2(&w);
        if calm_steps >= 2 || basis.len() >= dim || beta <= 1e-15 * ritz.max(f64::MIN_POSITIVE) {
            return fro * ritz.max(0.0).sqrt();
        }
        betas.push(beta);
        q = w.into_iter().map(|v| v / beta).collect();
    }
}

/// Deterministic start vector with no zero component.
fn start_vector(dim: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..dim)
        .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.754_877_666_246_692_7).fract())
        .collect();
    let nrm = norm2(&raw);
    raw.into_iter().map(|v| v / nrm).collect()
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alphas` and off-diagonal `betas`, by Sturm-sequence bisection.
fn largest_tridiagonal_eigenvalue(alphas: &[f64], betas: &[f64]) -> f64 {
    let n = alphas.len();
    let radius = |i: usize| {
        let left = if i > 0 { betas[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { betas[i].abs() } else { 0.0 };
        left + right
    };
    let mut lo = (0..n).map(|i| alphas[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| alphas[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    // Invariant: count_above(lo) ≥ 1 and count_above(hi) = 0.
    lo -= f64::EPSILON * lo.abs().max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if eigenvalues_above(alphas, betas, mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Number of eigenvalues strictly greater than `x`.
fn eigenvalues_above(alphas: &[f64], betas: &[f64], x: f64) -> usize {
    let mut below = 0;
    let mut d = 1.0_f64;
    for i in 0..alphas.len() {
        let off = if i > 0 { betas[i - 1] * betas[i - 1] / d } else { 0.0 };
        d = alphas[i] - x - off;
        if d == 0.0 {
            d = -f64::EPSILON * (alphas[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            below += 1;
        }
    }
    alphas.len() - below
}
