use crate::Scalar;

/// Default number of quadrature nodes.
pub const DEFAULT_GRID_POINTS: usize = 2048;
/// Default margin, in sample standard deviations, beyond the sample range.
pub const DEFAULT_MARGIN_STDS: f64 = 3.0;

/// Composite trapezoid rule on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid<T> {
    pub points: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> QuadratureGrid<T> {
    /// `n ≥ 2` nodes spanning `[lo, hi]`.
    pub fn uniform(lo: T, hi: T, n: usize) -> Self {
        assert!(n >= 2, "quadrature needs at least two nodes");
        let step = (hi - lo) / T::from_usize(n - 1).unwrap();
        let points: Vec<T> = (0..n)
            .map(|i| lo + step * T::from_usize(i).unwrap())
            .collect();
        let mut weights = vec![step; n];
        weights[0] = step * T::lit(0.5);
        weights[n - 1] = step * T::lit(0.5);
        Self { points, weights }
    }

    /// Grid over `[min − m·std, max + m·std]` of a sample.
    pub fn for_sample(sample: &[T], n: usize, margin_stds: T) -> Self {
        let (lo, hi) = sample_span(sample, margin_stds);
        Self::uniform(lo, hi, n)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn lo(&self) -> T {
        self.points[0]
    }

    pub fn hi(&self) -> T {
        self.points[self.points.len() - 1]
    }

    pub fn integrate(&self, values: &[T]) -> T {
        self.weights.iter().zip(values).map(|(&w, &v)| w * v).sum()
    }
}

/// Sample mean and `1/T` standard deviation.
pub fn mean_std<T: Scalar>(sample: &[T]) -> (T, T) {
    let n = T::from_usize(sample.len().max(1)).unwrap();
    let mean = sample.iter().copied().sum::<T>() / n;
    let var = sample.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    (mean, var.sqrt())
}

fn sample_span<T: Scalar>(sample: &[T], margin_stds: T) -> (T, T) {
    let (_, std) = mean_std(sample);
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for &v in sample {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo - margin_stds * std, hi + margin_stds * std)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let g = QuadratureGrid::<f64>::uniform(-1.0, 3.0, 11);
        let v: Vec<f64> = g.points.iter().map(|x| 2.0 * x + 1.0).collect();
        assert!((g.integrate(&v) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn sample_grid_spans_with_margin() {
        let s = [0.0f64, 1.0, 2.0, 3.0];
        let (_, std) = mean_std(&s);
        let g = QuadratureGrid::for_sample(&s, 2048, 3.0);
        assert!((g.lo() - (0.0 - 3.0 * std)).abs() < 1e-12);
        assert!((g.hi() - (3.0 + 3.0 * std)).abs() < 1e-12);
        assert_eq!(g.len(), 2048);
    }
}
