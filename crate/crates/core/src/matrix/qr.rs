use super::{dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Column-pivoted Householder factorization `A[:, perm] = Q·R`.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// `m × p` with orthonormal columns, `p = min(m, n)`.
    pub q: DenseMatrix,
    /// `p × n` upper trapezoidal; `|R_ii|` non-increasing.
    pub r: DenseMatrix,
    /// 0-based column order: column `t` of `Q·R` is column `perm[t]` of `A`.
    pub perm: Vec<usize>,
}

/// Businger–Golub pivoted QR: each step takes the remaining column with the
/// largest residual Euclidean norm, lowest index on ties.
///
/// # Errors
///
/// `ZeroMatrix` when every entry of `a` is zero.
pub fn pivoted_qr(a: &DenseMatrix) -> Result<PivotedQr> {
    if a.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let h = Householder::factor(a.to_columns(), a.rows(), true);
    let p = h.steps();
    let q = DenseMatrix::from_columns(&h.q_columns(p)).expect("q has positive size");
    Ok(PivotedQr { q, r: h.r_matrix(), perm: h.perm })
}

/// Orthonormal columns spanning the leading columns of `a` (`m ≥ n`): the
/// thin `Q` of an unpivoted Householder QR with signs chosen so that
/// `diag(R) ≥ 0`. Columns beyond the rank of `a` are completed arbitrarily
/// but stay orthonormal.
///
/// # Errors
///
/// `DimensionMismatch` when `a` is wider than tall.
pub fn orthonormalize(a: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() < a.cols() {
        return Err(Error::DimensionMismatch {
            expected: "at least as many rows as columns".into(),
            found: format!("{}x{}", a.rows(), a.cols()),
        });
    }
    let h = Householder::factor(a.to_columns(), a.rows(), false);
    let diag = h.r_diag();
    let cols: Vec<Vec<f64>> = h
        .q_columns(a.cols())
        .into_iter()
        .zip(diag)
        .map(|(col, d)| if d < 0.0 { col.into_iter().map(|v| -v).collect() } else { col })
        .collect();
    Ok(DenseMatrix::from_columns(&cols).expect("positive size"))
}

/// `count` orthonormal columns orthogonal to the span of `basis`
/// (`n × k`, orthonormal columns, `k + count ≤ n`).
pub(crate) fn complement_columns(basis: &DenseMatrix, count: usize) -> DenseMatrix {
    let k = basis.cols();
    assert!(count >= 1 && k + count <= basis.rows(), "complement size out of range");
    let h = Householder::factor(basis.to_columns(), basis.rows(), false);
    let cols: Vec<Vec<f64>> = (k..k + count).map(|j| h.q_column(j)).collect();
    DenseMatrix::from_columns(&cols).expect("positive size")
}

/// Reflectors and the reduced columns of a Householder QR, kept column-major.
pub(crate) struct Householder {
    m: usize,
    /// Reduced columns; entries below the diagonal are zero.
    pub(crate) cols: Vec<Vec<f64>>,
    /// Reflector `j` acts on rows `j..m` as `x ← x − beta·v·(vᵀx)`.
    vs: Vec<Vec<f64>>,
    betas: Vec<f64>,
    pub(crate) perm: Vec<usize>,
}

impl Householder {
    pub(crate) fn factor(mut cols: Vec<Vec<f64>>, m: usize, pivot: bool) -> Self {
        let n = cols.len();
        let p = m.min(n);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut vs = Vec::with_capacity(p);
        let mut betas = Vec::with_capacity(p);

        for j in 0..p {
            if pivot {
                let mut best = j;
                let mut best_norm = norm2(&cols[j][j..]);
                for t in j + 1..n {
                    let nt = norm2(&cols[t][j..]);
                    if nt > best_norm {
                        best = t;
                        best_norm = nt;
                    }
                }
                cols.swap(j, best);
                perm.swap(j, best);
            }

            let x = &cols[j][j..];
            let xnorm = norm2(x);
            let mut v = x.to_vec();
            let beta = if xnorm == 0.0 {
                0.0
            } else {
                let alpha = if x[0] >= 0.0 { -xnorm } else { xnorm };
                v[0] -= alpha;
                let vv = dot(&v, &v);
                if vv == 0.0 { 0.0 } else { 2.0 / vv }
            };

            if beta != 0.0 {
                for col in cols.iter_mut().skip(j) {
                    let s = beta * dot(&v, &col[j..]);
                    if s != 0.0 {
                        for (ci, vi) in col[j..].iter_mut().zip(&v) {
                            *ci -= s * vi;
                        }
                    }
                }
                for e in cols[j][j + 1..].iter_mut() {
                    *e = 0.0;
                }
            }
            vs.push(v);
            betas.push(beta);
        }
        Self { m, cols, vs, betas, perm }
    }

    /// Number of reflectors, `min(m, n)`.
    pub(crate) fn steps(&self) -> usize {
        self.vs.len()
    }

    pub(crate) fn r_diag(&self) -> Vec<f64> {
        (0..self.steps()).map(|j| self.cols[j][j]).collect()
    }

    /// First `count` columns of the full orthogonal factor `H_0 H_1 ⋯`.
    pub(crate) fn q_columns(&self, count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|j| self.q_column(j)).collect()
    }

    /// Column `j` of the full `m × m` orthogonal factor.
    pub(crate) fn q_column(&self, j: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.m];
        x[j] = 1.0;
        for t in (0..self.steps()).rev() {
            let beta = self.betas[t];
            if beta == 0.0 {
                continue;
            }
            let v = &self.vs[t];
            let s = beta * dot(v, &x[t..]);
            if s != 0.0 {
                for (xi, vi) in x[t..].iter_mut().zip(v) {
                    *xi -= s * vi;
                }
            }
        }
        x
    }

    /// Leading `p × n` block of the reduced columns.
    pub(crate) fn r_matrix(&self) -> DenseMatrix {
        let p = self.steps();
        let n = self.cols.len();
        let mut data = vec![0.0; p * n];
        for (j, col) in self.cols.iter().enumerate() {
            for i in 0..p.min(j + 1) {
                data[i * n + j] = col[i];
            }
        }
        DenseMatrix::new(p, n, data).expect("r has positive size")
    }
}
