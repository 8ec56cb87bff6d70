use super::qr::Householder;
use super::{norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Pivots with `|R_ii|` at or below this multiple of the largest column norm
/// are treated as dependent.
pub const COLUMN_DROP_TOLERANCE: f64 = 1e-12;

/// Orthonormal basis `Q` of `span(c)` from pivoted QR, keeping the leading
/// pivots above the drop tolerance. `None` when `c` is zero.
pub fn orthonormal_basis(c: &DenseMatrix) -> Option<DenseMatrix> {
    let cols = c.to_columns();
    let largest = cols.iter().map(|col| norm2(col)).fold(0.0_f64, f64::max);
    if largest == 0.0 {
        return None;
    }
    let h = Householder::factor(cols, c.rows(), true);
    let keep = h
        .r_diag()
        .iter()
        .take_while(|d| d.abs() > COLUMN_DROP_TOLERANCE * largest)
        .count();
    Some(DenseMatrix::from_columns(&h.q_columns(keep)).expect("keep ≥ 1"))
}

/// `A − Q·Qᵀ·A` with `Q` an orthonormal basis of `span(c)`; equals
/// `A − C·C⁺·A`. The projection is applied twice so the result is
/// orthogonal to `span(c)` to working precision.
///
/// # Errors
///
/// `DimensionMismatch` when `a` and `c` have different row counts.
pub fn projection_residual(a: &DenseMatrix, c: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() != c.rows() {
        return Err(Error::DimensionMismatch {
            expected: format!("{} rows", a.rows()),
            found: format!("{} rows", c.rows()),
        });
    }
    match orthonormal_basis(c) {
        None => Ok(a.clone()),
        Some(q) => Ok(residual_against(a, &q)),
    }
}

/// `(I − QQᵀ)²·A` for orthonormal `Q`.
fn residual_against(a: &DenseMatrix, q: &DenseMatrix) -> DenseMatrix {
    let mut res = a.clone();
    for _ in 0..2 {
        let coeffs = q.t_matmul(&res).expect("row counts agree");
        res = res.sub(&q.matmul(&coeffs).expect("shapes agree")).expect("shapes agree");
    }
    res
}
