//! Centering and whitening of observation matrices.
//!
//! Rows are channels, columns are samples. Covariances use the `1/T`
//! normalization so that whitened rows have unit sample variance under the
//! same averaging the optimizer uses for its expectations.

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{IcaError, Result};
use crate::linalg::sym_eigen;
use crate::Scalar;

/// Relative eigenvalue floor below which the covariance counts as singular.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Affine map `Z = forward · (X − mean)` together with its inverse.
#[derive(Debug, Clone)]
pub struct WhiteningTransform<T> {
    pub mean: Array1<T>,
    pub forward: Array2<T>,
    pub inverse: Array2<T>,
}

impl<T: Scalar> WhiteningTransform<T> {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Applies the full transform (centering included) to new data.
    pub fn apply(&self, x: ArrayView2<'_, T>) -> Array2<T> {
        let centered = &x - &self.mean.view().insert_axis(Axis(1));
        self.forward.dot(&centered)
    }
}

/// Subtracts each row's sample mean.
pub fn center<T: Scalar>(x: ArrayView2<'_, T>) -> Result<(Array2<T>, Array1<T>)> {
    let t = x.ncols();
    if t < 2 {
        return Err(IcaError::TooFewSamples { got: t, need: 2 });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(IcaError::InvalidData(
            "non-finite entry in sample matrix".into(),
        ));
    }
    let n_samples = T::from_usize(t).unwrap();
    let mean = Array1::from_iter(x.rows().into_iter().map(|row| {
        // two-pass mean: exact zero for constant rows
        let m = row.sum() / n_samples;
        let corr = row.iter().map(|&v| v - m).sum::<T>() / n_samples;
        m + corr
    }));
    let centered = &x - &mean.view().insert_axis(Axis(1));
    Ok((centered, mean))
}

/// Sample covariance `X Xᵀ / T` of already-centered rows.
pub fn covariance<T: Scalar>(xc: ArrayView2<'_, T>) -> Array2<T> {
    let t = T::from_usize(xc.ncols()).unwrap();
    xc.dot(&xc.t()) / t
}

/// PCA whitening `V = D^{-1/2} Eᵀ` of centered data.
///
/// Eigenvectors are sign-normalized so that their largest-magnitude entry is
/// positive, which makes the transform reproducible across platforms.
pub fn whiten<T: Scalar>(xc: ArrayView2<'_, T>) -> Result<(Array2<T>, WhiteningTransform<T>)> {
    let n = xc.nrows();
    if xc.ncols() < 2 {
        return Err(IcaError::TooFewSamples {
            got: xc.ncols(),
            need: 2,
        });
    }
    let cov = covariance(xc);
    let eig = sym_eigen(cov.view());
    let max = eig.values[0];
    let min = eig.values[n - 1];
    if !(max > T::zero()) || min < T::lit(RANK_TOLERANCE) * max {
        let ratio = if max > T::zero() {
            (min / max).to_f64_lossy()
        } else {
            0.0
        };
        return Err(IcaError::RankDeficient { ratio });
    }

    let mut vectors = eig.vectors;
    for mut col in vectors.columns_mut() {
        let mut pivot = T::zero();
        for &v in col.iter() {
            if v.abs() > pivot.abs() {
                pivot = v;
            }
        }
        if pivot < T::zero() {
            col.mapv_inplace(|v| -v);
        }
    }

    let mut forward = vectors.t().to_owned();
    let mut inverse = vectors.clone();
    for (i, &lam) in eig.values.iter().enumerate() {
        let s = lam.sqrt();
        forward.row_mut(i).mapv_inplace(|v| v / s);
        inverse.column_mut(i).mapv_inplace(|v| v * s);
    }
    let z = forward.dot(&xc);
    let transform = WhiteningTransform {
        mean: Array1::zeros(n),
        forward,
        inverse,
    };
    Ok((z, transform))
}

/// [`center`] followed by [`whiten`], with the mean recorded in the transform.
pub fn center_and_whiten<T: Scalar>(
    x: ArrayView2<'_, T>,
) -> Result<(Array2<T>, WhiteningTransform<T>)> {
    let (xc, mean) = center(x)?;
    let (z, mut transform) = whiten(xc.view())?;
    transform.mean = mean;
    Ok((z, transform))
}
