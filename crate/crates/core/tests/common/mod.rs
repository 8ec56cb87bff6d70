//! Oracles shared by the integration tests. Nothing here calls the
//! factorizations under test.
#![allow(dead_code)]

use detlev::rng::{gaussian_matrix, seeded};
use detlev::DenseMatrix;

pub fn random_matrix(m: usize, n: usize, seed: u64) -> DenseMatrix {
    gaussian_matrix(m, n, &mut seeded(seed))
}

/// Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi, descending.
pub fn symmetric_eigenvalues(s: &[Vec<f64>]) -> Vec<f64> {
    let n = s.len();
    let mut a: Vec<Vec<f64>> = s.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - sn * akq;
                    a[k][q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - sn * aqk;
                    a[q][k] = sn * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Singular values from the eigenvalues of the smaller Gram matrix.
pub fn singular_values(a: &DenseMatrix) -> Vec<f64> {
    let (m, n) = (a.rows(), a.cols());
    let gram: Vec<Vec<f64>> = if n <= m {
        (0..n)
            .map(|i| (0..n).map(|j| (0..m).map(|r| a.get(r, i) * a.get(r, j)).sum()).collect())
            .collect()
    } else {
        (0..m)
            .map(|i| (0..m).map(|j| (0..n).map(|c| a.get(i, c) * a.get(j, c)).sum()).collect())
            .collect()
    };
    symmetric_eigenvalues(&gram).into_iter().map(|e| e.max(0.0).sqrt()).collect()
}

/// Residual `A − Q Qᵀ A` with `Q` from modified Gram–Schmidt on `c`,
/// dropping columns whose remainder falls below `1e-10` of their norm.
pub fn gram_schmidt_residual(a: &DenseMatrix, c: &DenseMatrix) -> DenseMatrix {
    let m = a.rows();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for j in 0..c.cols() {
        let mut v = c.column(j);
        let norm0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _ in 0..2 {
            for q in &basis {
                let d: f64 = q.iter().zip(&v).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-10 * norm0 && norm > 0.0 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut out = a.clone();
    for col in 0..a.cols() {
        let mut v = a.column(col);
        for q in &basis {
            let d: f64 = q.iter().zip(&v).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
        }
        for (r, x) in v.into_iter().enumerate().take(m) {
            out.set(r, col, x);
        }
    }
    out
}

pub fn spectral_norm_oracle(a: &DenseMatrix) -> f64 {
    singular_values(a)[0]
}

/// All `size`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}
