use super::qr::Householder;
use super::{axpy, dot, DenseMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `A = U·diag(σ)·Vᵀ` truncated to the numerical rank.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// `m × ρ`, orthonormal columns.
    pub u: DenseMatrix,
    /// `ρ` strictly positive values, non-increasing.
    pub sigma: Vec<f64>,
    /// `n × ρ`, orthonormal columns.
    pub v: DenseMatrix,
}

impl SvdFactors {
    /// Numerical rank `ρ`.
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    /// Top-`k` right singular vectors `V_k`, or `None` when `k > ρ`.
    pub fn v_k(&self, k: usize) -> Option<DenseMatrix> {
        (k >= 1 && k <= self.rank()).then(|| self.v.leading_columns(k).expect("k in range"))
    }

    /// Top-`k` left singular vectors `U_k`, or `None` when `k > ρ`.
    pub fn u_k(&self, k: usize) -> Option<DenseMatrix> {
        (k >= 1 && k <= self.rank()).then(|| self.u.leading_columns(k).expect("k in range"))
    }

    /// `U_k·diag(σ_1..σ_k)·V_kᵀ`; all of `A` when `k ≥ ρ`.
    pub fn truncated(&self, k: usize) -> DenseMatrix {
        let k = k.min(self.rank());
        let (m, n) = (self.u.rows(), self.v.rows());
        let mut data = vec![0.0; m * n];
        for t in 0..k {
            let s = self.sigma[t];
            let vt = self.v.column(t);
            for i in 0..m {
                let coef = s * self.u.get(i, t);
                if coef != 0.0 {
                    axpy(coef, &vt, &mut data[i * n..(i + 1) * n]);
                }
            }
        }
        DenseMatrix::new(m, n, data).expect("positive size")
    }
}

/// Singular values past the `k`-th: `(σ_{k+1}, sqrt(Σ_{i>k} σ_i²))`, zeros
/// once `k ≥ ρ`. These are the spectral and Frobenius errors of `A_k`.
///
/// # Examples
///
/// ```
/// use detlev::{best_rank_k_errors, svd, DenseMatrix};
/// let f = svd(&DenseMatrix::from_diag(&[5.0, 4.0, 3.0, 2.0]).unwrap()).unwrap();
/// let (spectral, frobenius) = best_rank_k_errors(&f, 1);
/// assert!((spectral - 4.0).abs() < 1e-12);
/// assert!((frobenius - 29f64.sqrt()).abs() < 1e-12);
/// ```
pub fn best_rank_k_errors(f: &SvdFactors, k: usize) -> (f64, f64) {
    let tail = f.sigma.get(k..).unwrap_or(&[]);
    let spectral = tail.first().copied().unwrap_or(0.0);
    let frobenius = tail.iter().map(|s| s * s).sum::<f64>().sqrt();
    (spectral, frobenius)
}

/// Thin SVD by pivoted QR followed by one-sided Jacobi on `Rᵀ`.
///
/// Singular triplets with `σ_i ≤ max(m, n)·eps·σ_1` are dropped.
///
/// # Errors
///
/// `ZeroMatrix` when every entry of `a` is zero.
pub fn svd(a: &DenseMatrix) -> Result<SvdFactors> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let (m, n) = (a.rows(), a.cols());
    let f = if m >= n {
        tall_svd(a.to_columns(), m)
    } else {
        let t = tall_svd(a.transpose().to_columns(), n);
        TallSvd { u: t.v, sigma: t.sigma, v: t.u }
    };

    let cutoff = m.max(n) as f64 * f64::EPSILON * f.sigma[0];
    let rank = f.sigma.iter().take_while(|&&s| s > cutoff).count();
    let u = DenseMatrix::from_columns(&f.u[..rank]).expect("rank ≥ 1 for nonzero input");
    let v = DenseMatrix::from_columns(&f.v[..rank]).expect("rank ≥ 1 for nonzero input");
    Ok(SvdFactors { u, sigma: f.sigma[..rank].to_vec(), v })
}

/// Column-major factors of a `p × q` matrix with `p ≥ q`, sorted by `σ`.
struct TallSvd {
    u: Vec<Vec<f64>>,
    sigma: Vec<f64>,
    v: Vec<Vec<f64>>,
}

fn tall_svd(cols: Vec<Vec<f64>>, p: usize) -> TallSvd {
    let q = cols.len();
    // W[:, perm] = Q·R, and Jacobi on X = Rᵀ gives X·J = G with orthogonal
    // columns, so W[:, perm] = (Q·J)·Σ·Ũᵀ where Ũ = G·Σ⁻¹.
    let h = Householder::factor(cols, p, true);
    let r = h.r_matrix();
    let mut x: Vec<Vec<f64>> = (0..q).map(|i| r.row(i).to_vec()).collect();
    let mut j: Vec<Vec<f64>> = (0..q).map(|i| unit(q, i)).collect();
    jacobi_orthogonalize(&mut x, &mut j);

    let sigma_raw: Vec<f64> = x.iter().map(|g| dot(g, g).sqrt()).collect();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&s, &t| sigma_raw[t].total_cmp(&sigma_raw[s]).then(s.cmp(&t)));

    let qcols = h.q_columns(q);
    let mut u = Vec::with_capacity(q);
    let mut v = Vec::with_capacity(q);
    let mut sigma = Vec::with_capacity(q);
    for &t in &order {
        let s = sigma_raw[t];
        if s == 0.0 {
            break;
        }
        let mut ucol = vec![0.0; p];
        for (jc, qc) in j[t].iter().zip(&qcols) {
            if *jc != 0.0 {
                axpy(*jc, qc, &mut ucol);
            }
        }
        let mut vcol = vec![0.0; q];
        for (row, &g) in x[t].iter().enumerate() {
            vcol[h.perm[row]] = g / s;
        }
        u.push(ucol);
        v.push(vcol);
        sigma.push(s);
    }
    TallSvd { u, sigma, v }
}

/// Hestenes one-sided Jacobi: rotates column pairs of `x` until mutually
/// orthogonal to working precision, applying the same rotations to `acc`.
fn jacobi_orthogonalize(x: &mut [Vec<f64>], acc: &mut [Vec<f64>]) {
    let q = x.len();
    let tol = f64::EPSILON * q.max(1) as f64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for a in 0..q {
            for b in a + 1..q {
                let alpha = dot(&x[a], &x[a]);
                let beta = dot(&x[b], &x[b]);
                let gamma = dot(&x[a], &x[b]);
                if alpha == 0.0 || beta == 0.0 || gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + 1.0_f64.hypot(zeta));
                let c = 1.0 / 1.0_f64.hypot(t);
                let s = c * t;
                rotate_pair(x, a, b, c, s);
                rotate_pair(acc, a, b, c, s);
            }
        }
        if !rotated {
            return;
        }
    }
}

/// `(x_a, x_b) ← (c·x_a − s·x_b, s·x_a + c·x_b)`.
fn rotate_pair(cols: &mut [Vec<f64>], a: usize, b: usize, c: f64, s: f64) {
    let (lo, hi) = cols.split_at_mut(b);
    for (xa, xb) in lo[a].iter_mut().zip(hi[0].iter_mut()) {
        let (va, vb) = (*xa, *xb);
        *xa = c * va - s * vb;
        *xb = s * va + c * vb;
    }
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = 1.0;
    e
}
