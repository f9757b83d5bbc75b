//! Separation quality and parallel-efficiency measures.

mod assignment;

pub use assignment::{max_weight_assignment, min_cost_assignment};

use ndarray::{Array2, ArrayView2};

use crate::error::{IcaError, Result};
use crate::optimizer::PhaseTimings;
use crate::preprocess::WhiteningTransform;
use crate::Scalar;

/// dB value reported for a perfect (zero-interference) gain matrix.
pub const ISR_FLOOR_DB: f64 = -300.0;

#[derive(Debug, Clone)]
pub struct SeparationReport<T> {
    /// Overall system `G = W · V · A` from sources to estimates.
    pub gain: Array2<T>,
    pub isr_db: T,
    /// `permutation[i]` is the estimate paired with true source `i`.
    pub permutation: Vec<usize>,
    pub correlations: Vec<T>,
    pub timing: PhaseTimings,
    /// Sequential over parallel wall time, when both were measured.
    pub speedup: Option<f64>,
}

/// `G = W · forward · A`.
pub fn gain_matrix<T: Scalar>(
    w: ArrayView2<'_, T>,
    whitening: &WhiteningTransform<T>,
    a: ArrayView2<'_, T>,
) -> Result<Array2<T>> {
    if w.ncols() != whitening.forward.nrows() || whitening.forward.ncols() != a.nrows() {
        return Err(IcaError::Shape(format!(
            "cannot compose W {:?}, V {:?}, A {:?}",
            w.dim(),
            whitening.forward.dim(),
            a.dim()
        )));
    }
    Ok(w.dot(&whitening.forward).dot(&a))
}

/// Average interference-to-signal ratio of a gain matrix, in dB.
///
/// Each row is matched to one column by the assignment minimizing the mean
/// of `Σ_{n≠σ(m)} G²_{mn} / G²_{mσ(m)}`, so the value is invariant to row and
/// column permutations, sign flips and row scaling. Perfect separation is
/// reported as [`ISR_FLOOR_DB`].
pub fn isr<T: Scalar>(g: ArrayView2<'_, T>) -> Result<T> {
    isr_linear(g).map(|v| {
        let floor = T::lit(ISR_FLOOR_DB);
        if v > T::zero() {
            (T::lit(10.0) * v.log10()).max(floor)
        } else {
            floor
        }
    })
}

/// [`isr`] before the dB conversion.
pub fn isr_linear<T: Scalar>(g: ArrayView2<'_, T>) -> Result<T> {
    let n = g.nrows();
    if n == 0 || g.ncols() != n {
        return Err(IcaError::Shape(format!("gain matrix is {:?}", g.dim())));
    }
    let sq = g.mapv(|v| v * v);
    let row_energy: Vec<T> = sq.rows().into_iter().map(|r| r.sum()).collect();
    if let Some(m) = row_energy.iter().position(|&e| !(e > T::zero())) {
        return Err(IcaError::DegenerateGain(format!("row {m} is zero")));
    }
    let big = T::max_value().sqrt();
    let cost = Array2::from_shape_fn((n, n), |(m, c)| {
        let s = sq[(m, c)];
        if s > T::zero() {
            ((row_energy[m] - s) / s).min(big)
        } else {
            big
        }
    });
    let assign = min_cost_assignment(cost.view());
    let mut total = T::zero();
    for (m, &c) in assign.iter().enumerate() {
        let s = sq[(m, c)];
        if !(s > T::zero()) {
            return Err(IcaError::DegenerateGain(format!(
                "row {m} has no usable dominant entry"
            )));
        }
        total += ((row_energy[m] - s) / s).max(T::zero());
    }
    Ok(total / T::from_usize(n).unwrap())
}

/// |Pearson correlation| between every true source row and estimate row.
pub fn abs_correlation_matrix<T: Scalar>(
    s_true: ArrayView2<'_, T>,
    y: ArrayView2<'_, T>,
) -> Result<Array2<T>> {
    if s_true.dim() != y.dim() {
        return Err(IcaError::Shape(format!(
            "sources {:?} vs estimates {:?}",
            s_true.dim(),
            y.dim()
        )));
    }
    let standardize = |x: ArrayView2<'_, T>| -> Result<Array2<T>> {
        let mut out = x.to_owned();
        let t = T::from_usize(x.ncols()).unwrap();
        for (i, mut row) in out.rows_mut().into_iter().enumerate() {
            let mean = row.sum() / t;
            row.mapv_inplace(|v| v - mean);
            let sd = (row.iter().map(|&v| v * v).sum::<T>() / t).sqrt();
            if !(sd > T::zero()) {
                return Err(IcaError::DegenerateSource(i));
            }
            row.mapv_inplace(|v| v / sd);
        }
        Ok(out)
    };
    let a = standardize(s_true)?;
    let b = standardize(y)?;
    let t = T::from_usize(s_true.ncols()).unwrap();
    Ok(a.dot(&b.t()).mapv(|v| (v / t).abs().min(T::one())))
}

/// Pairs estimates with true sources by maximizing total |correlation|.
pub fn pair_sources<T: Scalar>(
    s_true: ArrayView2<'_, T>,
    y: ArrayView2<'_, T>,
) -> Result<(Vec<usize>, Vec<T>)> {
    let corr = abs_correlation_matrix(s_true, y)?;
    Ok(pair_from_correlations(corr.view()))
}

/// Assignment step of [`pair_sources`] on a precomputed |corr| matrix.
pub fn pair_from_correlations<T: Scalar>(corr: ArrayView2<'_, T>) -> (Vec<usize>, Vec<T>) {
    let perm = max_weight_assignment(corr);
    let vals = perm
        .iter()
        .enumerate()
        .map(|(i, &j)| corr[(i, j)])
        .collect();
    (perm, vals)
}

/// Amdahl's law: overall speedup when a fraction `f` of the work runs `s`
/// times faster.
pub fn amdahl_speedup<T: Scalar>(f: T, s: T) -> T {
    T::one() / ((T::one() - f) + f / s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn isr_examples() {
        assert_eq!(isr(Array2::<f64>::eye(3).view()).unwrap(), ISR_FLOOR_DB);
        let g = array![[1.0, 0.1], [0.1, 1.0]];
        assert_abs_diff_eq!(isr_linear(g.view()).unwrap(), 0.01, epsilon = 1e-15);
        assert_abs_diff_eq!(isr(g.view()).unwrap(), -20.0, epsilon = 1e-9);
        let p = array![[0.0, -2.0, 0.0], [0.0, 0.0, 1.0], [3.0, 0.0, 0.0]];
        assert_eq!(isr(p.view()).unwrap(), ISR_FLOOR_DB);
    }

    #[test]
    fn isr_degenerate() {
        let g = array![[1.0, 0.0], [0.0, 0.0]];
        assert!(matches!(isr(g.view()), Err(IcaError::DegenerateGain(_))));
    }

    #[test]
    fn pairing_identity_and_reversal() {
        let s = array![
            [1.0, 2.0, 0.0, -1.0, 3.0],
            [0.5, -1.0, 2.0, 0.0, 1.0],
            [2.0, 2.0, -3.0, 1.0, 0.0]
        ];
        let (p, c) = pair_sources(s.view(), s.view()).unwrap();
        assert_eq!(p, vec![0, 1, 2]);
        c.iter()
            .for_each(|&v| assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12));
        let mut y = s.clone();
        for i in 0..3 {
            y.row_mut(i).assign(&s.row(2 - i).mapv(|v| -2.0 * v));
        }
        let (p, c) = pair_sources(s.view(), y.view()).unwrap();
        assert_eq!(p, vec![2, 1, 0]);
        c.iter()
            .for_each(|&v| assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12));
    }

    #[test]
    fn pairing_zero_variance() {
        let s = array![[1.0, 1.0, 1.0], [0.0, 1.0, 2.0]];
        assert!(matches!(
            pair_sources(s.view(), s.view()),
            Err(IcaError::DegenerateSource(0))
        ));
    }

    #[test]
    fn amdahl_examples() {
        assert_eq!(amdahl_speedup(1.0, 4.0), 4.0);
        assert_eq!(amdahl_speedup(0.0, 7.0), 1.0);
        assert_abs_diff_eq!(amdahl_speedup(0.95, 4.0), 1.0 / 0.2875, epsilon = 1e-12);
        assert_abs_diff_eq!(amdahl_speedup(0.95, 4.0), 3.478, epsilon = 1e-3);
    }
}
