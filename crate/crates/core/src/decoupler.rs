//! Perpendicular vectors for the decoupled determinant.
//!
//! For row `m` of `W`, `h_m` is the unit vector orthogonal to every other
//! row, oriented so that `h_m · w_m > 0`. Then
//! `|det W| = (h_m · w_m) · vol(rows ≠ m)`, and the second factor does not
//! depend on `w_m`.

use ndarray::{Array1, ArrayView2, Axis};

use crate::error::{IcaError, Result};
use crate::linalg::{householder_qr, sym_eigen};
use crate::Scalar;

/// Smallest-to-largest singular value ratio of the remaining rows below
/// which `W` counts as collapsed.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PerpVector<T> {
    pub h: Array1<T>,
    /// Zero-based row the vector belongs to.
    pub row_index: usize,
}

impl<T: Scalar> PerpVector<T> {
    /// `h_m · w_m` for the owning row.
    pub fn projection(&self, w: ArrayView2<'_, T>) -> T {
        self.h.dot(&w.row(self.row_index))
    }
}

pub fn perp_vector<T: Scalar>(w: ArrayView2<'_, T>, m: usize) -> Result<PerpVector<T>> {
    let n = w.nrows();
    if w.ncols() != n {
        return Err(IcaError::Shape(format!(
            "demixing matrix is {}x{}",
            n,
            w.ncols()
        )));
    }
    if m >= n {
        return Err(IcaError::Shape(format!("row {m} out of range for N = {n}")));
    }
    let row_m = w.row(m);
    let mut h = if n == 1 {
        Array1::from_elem(1, T::one())
    } else {
        let others = w.select(Axis(0), &(0..n).filter(|&i| i != m).collect::<Vec<_>>());
        let (q, r) = householder_qr(others.t());
        let gram = r.t().dot(&r);
        let sv = sym_eigen(gram.view()).values;
        let hi = sv[0].max(T::zero()).sqrt();
        let lo = sv[n - 2].max(T::zero()).sqrt();
        if !(hi > T::zero()) || lo < T::lit(DEGENERACY_TOLERANCE) * hi {
            return Err(IcaError::DegenerateDemixing(format!(
                "rows other than {m} are rank deficient (singular value ratio {:e})",
                if hi > T::zero() {
                    (lo / hi).to_f64_lossy()
                } else {
                    0.0
                }
            )));
        }
        q.column(n - 1).to_owned()
    };
    let norm = h.dot(&h).sqrt();
    h.mapv_inplace(|v| v / norm);
    if h.dot(&row_m) < T::zero() {
        h.mapv_inplace(|v| -v);
    }
    Ok(PerpVector { h, row_index: m })
}
