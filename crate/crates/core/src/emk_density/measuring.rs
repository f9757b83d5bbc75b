use crate::error::{IcaError, Result};
use crate::Scalar;

/// Number of fixed global measuring functions.
pub const GLOBAL_COUNT: usize = 4;
/// Upper bound on adaptive local kernels.
pub const MAX_LOCAL_KERNELS: usize = 5;

/// Global measuring functions, in evaluation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GlobalFunction {
    /// `1`, the normalization constraint.
    Constant,
    /// `y`
    Identity,
    /// `y²`
    Square,
    /// `y / (1 + y²)`
    Rational,
}

pub const GLOBALS: [GlobalFunction; GLOBAL_COUNT] = [
    GlobalFunction::Constant,
    GlobalFunction::Identity,
    GlobalFunction::Square,
    GlobalFunction::Rational,
];

impl GlobalFunction {
    pub fn name(self) -> &'static str {
        match self {
            GlobalFunction::Constant => "const1",
            GlobalFunction::Identity => "identity",
            GlobalFunction::Square => "square",
            GlobalFunction::Rational => "rational",
        }
    }
}

/// Local measuring function `exp(−(y − μ)² / (2σ²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel<T> {
    pub mu: T,
    pub sigma: T,
}

impl<T: Scalar> GaussianKernel<T> {
    pub fn new(mu: T, sigma: T) -> Result<Self> {
        if !mu.is_finite() {
            return Err(IcaError::InvalidParameter(format!(
                "kernel mean {mu} is not finite"
            )));
        }
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(IcaError::InvalidParameter(format!(
                "kernel width {sigma} must be positive"
            )));
        }
        Ok(Self { mu, sigma })
    }

    #[inline]
    pub fn value(&self, y: T) -> T {
        let d = (y - self.mu) / self.sigma;
        (-T::lit(0.5) * d * d).exp()
    }

    #[inline]
    pub fn derivative(&self, y: T) -> T {
        let d = (y - self.mu) / self.sigma;
        -(d / self.sigma) * (-T::lit(0.5) * d * d).exp()
    }
}

/// Ordered list of measuring functions: the four globals then the locals.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuringSpec<T> {
    locals: Vec<GaussianKernel<T>>,
}

impl<T: Scalar> Default for MeasuringSpec<T> {
    fn default() -> Self {
        Self::globals_only()
    }
}

impl<T: Scalar> MeasuringSpec<T> {
    pub fn globals_only() -> Self {
        Self { locals: Vec::new() }
    }

    pub fn new(locals: Vec<GaussianKernel<T>>) -> Result<Self> {
        if locals.len() > MAX_LOCAL_KERNELS {
            return Err(IcaError::InvalidParameter(format!(
                "{} local kernels exceeds the cap of {MAX_LOCAL_KERNELS}",
                locals.len()
            )));
        }
        for k in &locals {
            GaussianKernel::new(k.mu, k.sigma)?;
        }
        Ok(Self { locals })
    }

    /// Copy of this spec with one more local kernel appended.
    pub fn with_kernel(&self, kernel: GaussianKernel<T>) -> Result<Self> {
        let mut locals = self.locals.clone();
        locals.push(kernel);
        Self::new(locals)
    }

    pub fn globals(&self) -> &'static [GlobalFunction] {
        &GLOBALS
    }

    pub fn locals(&self) -> &[GaussianKernel<T>] {
        &self.locals
    }

    /// Total number of measuring functions `M`.
    pub fn len(&self) -> usize {
        GLOBAL_COUNT + self.locals.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Writes `r(y)` into `out` (length `M`).
    #[inline]
    pub fn eval_into(&self, y: T, out: &mut [T]) {
        debug_assert_eq!(out.len(), self.len());
        out[0] = T::one();
        out[1] = y;
        out[2] = y * y;
        out[3] = y / (T::one() + y * y);
        for (slot, k) in out[GLOBAL_COUNT..].iter_mut().zip(&self.locals) {
            *slot = k.value(y);
        }
    }

    /// Writes `r′(y)` into `out` (length `M`).
    #[inline]
    pub fn eval_deriv_into(&self, y: T, out: &mut [T]) {
        debug_assert_eq!(out.len(), self.len());
        let y2 = y * y;
        let q = T::one() + y2;
        out[0] = T::zero();
        out[1] = T::one();
        out[2] = T::lit(2.0) * y;
        out[3] = (T::one() - y2) / (q * q);
        for (slot, k) in out[GLOBAL_COUNT..].iter_mut().zip(&self.locals) {
            *slot = k.derivative(y);
        }
    }

    /// `Σ_i λ_i r_i′(y)`, the score-like weight the ICA gradient needs.
    #[inline]
    pub fn weighted_deriv(&self, y: T, lambda: &[T]) -> T {
        let y2 = y * y;
        let q = T::one() + y2;
        let mut s = lambda[1] + lambda[2] * T::lit(2.0) * y + lambda[3] * (T::one() - y2) / (q * q);
        for (k, &l) in self.locals.iter().zip(&lambda[GLOBAL_COUNT..]) {
            s += l * k.derivative(y);
        }
        s
    }

    /// `Σ_i λ_i r_i(y)`.
    #[inline]
    pub fn weighted_value(&self, y: T, lambda: &[T]) -> T {
        let mut s =
            lambda[0] + lambda[1] * y + lambda[2] * y * y + lambda[3] * y / (T::one() + y * y);
        for (k, &l) in self.locals.iter().zip(&lambda[GLOBAL_COUNT..]) {
            s += l * k.value(y);
        }
        s
    }
}

/// `[1, y, y², y/(1+y²), kernels…]` in spec order.
pub fn eval_measuring<T: Scalar>(y: T, spec: &MeasuringSpec<T>) -> Vec<T> {
    let mut out = vec![T::zero(); spec.len()];
    spec.eval_into(y, &mut out);
    out
}

/// Derivatives of [`eval_measuring`] with respect to `y`.
pub fn eval_measuring_deriv<T: Scalar>(y: T, spec: &MeasuringSpec<T>) -> Vec<T> {
    let mut out = vec![T::zero(); spec.len()];
    spec.eval_deriv_into(y, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn three_kernels() -> MeasuringSpec<f64> {
        MeasuringSpec::new(vec![
            GaussianKernel::new(-1.5, 0.4).unwrap(),
            GaussianKernel::new(0.3, 0.7).unwrap(),
            GaussianKernel::new(2.0, 0.25).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn globals_at_zero_and_one() {
        let spec = MeasuringSpec::<f64>::globals_only();
        assert_eq!(eval_measuring(0.0, &spec), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(eval_measuring(1.0, &spec), vec![1.0, 1.0, 1.0, 0.5]);
        assert_eq!(eval_measuring_deriv(0.0, &spec), vec![0.0, 1.0, 0.0, 1.0]);
        assert_eq!(eval_measuring_deriv(1.0, &spec), vec![0.0, 1.0, 2.0, 0.0]);
    }

    #[test]
    fn kernel_peaks_at_its_mean() {
        let spec = three_kernels();
        let r = eval_measuring(0.3, &spec);
        assert_eq!(r[5], 1.0);
        assert_eq!(spec.len(), 7);
    }

    #[test]
    fn spec_validation() {
        assert!(GaussianKernel::new(0.0, 0.0).is_err());
        assert!(GaussianKernel::new(f64::INFINITY, 1.0).is_err());
        let k = GaussianKernel::new(0.0, 1.0).unwrap();
        assert!(MeasuringSpec::new(vec![k; 6]).is_err());
        assert_eq!(MeasuringSpec::new(vec![k; 5]).unwrap().len(), 9);
    }

    #[test]
    fn weighted_helpers_match_vectors() {
        let spec = three_kernels();
        let lambda = [0.1, -0.2, -0.5, 0.3, 0.7, -0.4, 1.1];
        for &y in &[-2.0, -0.3, 0.0, 0.9, 2.4] {
            let r = eval_measuring(y, &spec);
            let d = eval_measuring_deriv(y, &spec);
            let v: f64 = r.iter().zip(&lambda).map(|(a, b)| a * b).sum();
            let g: f64 = d.iter().zip(&lambda).map(|(a, b)| a * b).sum();
            assert!((spec.weighted_value(y, &lambda) - v).abs() < 1e-14);
            assert!((spec.weighted_deriv(y, &lambda) - g).abs() < 1e-14);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn derivative_matches_central_differences(y in -6.0f64..6.0) {
            let spec = three_kernels();
            let h = 1e-5;
            let d = eval_measuring_deriv(y, &spec);
            let up = eval_measuring(y + h, &spec);
            let dn = eval_measuring(y - h, &spec);
            for i in 0..spec.len() {
                let fd = (up[i] - dn[i]) / (2.0 * h);
                prop_assert!((fd - d[i]).abs() < 1e-6, "entry {i}: {fd} vs {}", d[i]);
            }
        }
    }
}
