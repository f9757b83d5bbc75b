use ndarray::Array2;

use super::measuring::MeasuringSpec;
use super::quadrature::QuadratureGrid;
use crate::error::{IcaError, Result};
use crate::linalg::{sym_eigen, Lu};
use crate::Scalar;

/// Controls for the Lagrange-multiplier Newton solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions<T> {
    /// Max-abs constraint residual accepted as converged.
    pub tol: T,
    pub max_iters: usize,
    pub max_halvings: usize,
    /// Jacobians with a larger condition number are rejected.
    pub max_condition: T,
}

impl<T: Scalar> Default for NewtonOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::lit(1e-8).max(T::lit(1e3) * T::epsilon()),
            max_iters: 100,
            max_halvings: 20,
            max_condition: T::lit(1e12),
        }
    }
}

/// A fitted maximum-entropy density `p̂(y) = exp(−1 + Σ λ_i r_i(y))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntModel<T> {
    pub spec: MeasuringSpec<T>,
    pub lambda: Vec<T>,
    pub alpha: Vec<T>,
    pub grid: QuadratureGrid<T>,
}

/// Sample averages `α_i = (1/T) Σ_t r_i(y_t)`; `α_0` is exactly one.
pub fn sample_averages<T: Scalar>(sample: &[T], spec: &MeasuringSpec<T>) -> Vec<T> {
    let m = spec.len();
    let mut acc = vec![T::zero(); m];
    let mut r = vec![T::zero(); m];
    for &y in sample {
        spec.eval_into(y, &mut r);
        for (a, &v) in acc.iter_mut().zip(&r) {
            *a += v;
        }
    }
    let n = T::from_usize(sample.len().max(1)).unwrap();
    for a in acc.iter_mut() {
        *a /= n;
    }
    acc[0] = T::one();
    acc
}

/// Multipliers of the Gaussian with the given mean and variance, padded with
/// zeros for the rational function and any local kernels.
pub fn gaussian_lambda<T: Scalar>(mean: T, var: T, m: usize) -> Vec<T> {
    let two = T::lit(2.0);
    let mut lambda = vec![T::zero(); m];
    lambda[0] = T::one()
        - T::lit(0.5) * (T::lit(std::f64::consts::TAU) * var).ln()
        - mean * mean / (two * var);
    lambda[1] = mean / var;
    lambda[2] = -T::one() / (two * var);
    lambda
}

/// Measuring functions tabulated on the grid, one row per node.
struct Basis<T> {
    values: Array2<T>,
}

impl<T: Scalar> Basis<T> {
    fn new(spec: &MeasuringSpec<T>, grid: &QuadratureGrid<T>) -> Self {
        let m = spec.len();
        let mut values = Array2::zeros((grid.len(), m));
        for (mut row, &x) in values.rows_mut().into_iter().zip(&grid.points) {
            spec.eval_into(x, row.as_slice_mut().expect("standard layout"));
        }
        Self { values }
    }
}

struct DualEval<T> {
    /// `w_g · p̂(x_g)`
    weighted: Vec<T>,
    residual: Vec<T>,
    dual: T,
}

impl<T: Scalar> DualEval<T> {
    fn max_residual(&self) -> T {
        self.residual
            .iter()
            .fold(T::zero(), |acc, r| acc.max(r.abs()))
    }
}

fn eval_dual<T: Scalar>(
    basis: &Basis<T>,
    grid: &QuadratureGrid<T>,
    alpha: &[T],
    lambda: &[T],
) -> Option<DualEval<T>> {
    let m = lambda.len();
    let mut weighted = Vec::with_capacity(grid.len());
    let mut mass = vec![T::zero(); m];
    for (row, &w) in basis.values.rows().into_iter().zip(&grid.weights) {
        let r = row.as_slice().unwrap();
        let e = r.iter().zip(lambda).map(|(&a, &b)| a * b).sum::<T>() - T::one();
        let wp = w * e.exp();
        if !wp.is_finite() {
            return None;
        }
        weighted.push(wp);
        for (acc, &v) in mass.iter_mut().zip(r) {
            *acc += wp * v;
        }
    }
    let dual = mass[0] - lambda.iter().zip(alpha).map(|(&l, &a)| l * a).sum::<T>();
    let residual = mass.iter().zip(alpha).map(|(&p, &a)| p - a).collect();
    Some(DualEval {
        weighted,
        residual,
        dual,
    })
}

fn jacobian<T: Scalar>(basis: &Basis<T>, weighted: &[T], m: usize) -> Array2<T> {
    let mut jac = Array2::<T>::zeros((m, m));
    for (row, &wp) in basis.values.rows().into_iter().zip(weighted) {
        let r = row.as_slice().unwrap();
        for i in 0..m {
            let wri = wp * r[i];
            for j in i..m {
                jac[(i, j)] += wri * r[j];
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            jac[(i, j)] = jac[(j, i)];
        }
    }
    jac
}

/// Solves for the Lagrange multipliers matching `alpha` by damped Newton
/// iteration on the convex dual `∫ p̂ − λ·α`, using default options.
pub fn solve_lambda<T: Scalar>(
    alpha: &[T],
    spec: &MeasuringSpec<T>,
    grid: &QuadratureGrid<T>,
    lambda0: &[T],
) -> Result<Vec<T>> {
    solve_lambda_with(alpha, spec, grid, lambda0, &NewtonOptions::default())
}

pub fn solve_lambda_with<T: Scalar>(
    alpha: &[T],
    spec: &MeasuringSpec<T>,
    grid: &QuadratureGrid<T>,
    lambda0: &[T],
    opts: &NewtonOptions<T>,
) -> Result<Vec<T>> {
    let m = spec.len();
    if alpha.len() != m || lambda0.len() != m {
        return Err(IcaError::Shape(format!(
            "expected {m} multipliers and averages, got {} and {}",
            lambda0.len(),
            alpha.len()
        )));
    }
    if lambda0.iter().chain(alpha).any(|v| !v.is_finite()) {
        return Err(IcaError::InvalidParameter(
            "non-finite multiplier or average".into(),
        ));
    }
    let basis = Basis::new(spec, grid);
    let mut lambda = lambda0.to_vec();
    let mut state = eval_dual(&basis, grid, alpha, &lambda).ok_or(IcaError::NoConvergence {
        iterations: 0,
        residual: f64::INFINITY,
    })?;

    for iter in 0..opts.max_iters {
        let res = state.max_residual();
        if res < opts.tol {
            return Ok(lambda);
        }
        let jac = jacobian(&basis, &state.weighted, m);
        let eig = sym_eigen(jac.view());
        let (hi, lo) = (eig.values[0], eig.values[m - 1]);
        let condition = if lo > T::zero() {
            hi / lo
        } else {
            T::infinity()
        };
        if !(condition <= opts.max_condition) {
            return Err(IcaError::SingularJacobian {
                condition: condition.to_f64_lossy(),
            });
        }
        let step = Lu::new(jac.view())
            .solve(ndarray::ArrayView1::from(&state.residual))
            .ok_or(IcaError::SingularJacobian {
                condition: f64::INFINITY,
            })?;

        let slack = T::lit(10.0) * T::epsilon() * (T::one() + state.dual.abs());
        let mut scale = T::one();
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let cand: Vec<T> = lambda
                .iter()
                .zip(step.iter())
                .map(|(&l, &d)| l - scale * d)
                .collect();
            if let Some(next) = eval_dual(&basis, grid, alpha, &cand) {
                if next.dual <= state.dual + slack || next.max_residual() < res {
                    accepted = Some((cand, next));
                    break;
                }
            }
            scale *= T::lit(0.5);
        }
        match accepted {
            Some((cand, next)) => {
                lambda = cand;
                state = next;
            }
            None => {
                return Err(IcaError::NoConvergence {
                    iterations: iter + 1,
                    residual: res.to_f64_lossy(),
                })
            }
        }
    }
    let res = state.max_residual();
    if res < opts.tol {
        Ok(lambda)
    } else {
        Err(IcaError::NoConvergence {
            iterations: opts.max_iters,
            residual: res.to_f64_lossy(),
        })
    }
}

impl<T: Scalar> MaxEntModel<T> {
    /// Fits the multipliers for `spec` to the averages of `sample`.
    pub fn fit(
        sample: &[T],
        spec: MeasuringSpec<T>,
        grid: QuadratureGrid<T>,
        lambda0: &[T],
        opts: &NewtonOptions<T>,
    ) -> Result<Self> {
        let alpha = sample_averages(sample, &spec);
        let lambda = solve_lambda_with(&alpha, &spec, &grid, lambda0, opts)?;
        Ok(Self {
            spec,
            lambda,
            alpha,
            grid,
        })
    }

    #[inline]
    pub fn log_pdf(&self, y: T) -> T {
        self.spec.weighted_value(y, &self.lambda) - T::one()
    }

    #[inline]
    pub fn pdf(&self, y: T) -> T {
        self.log_pdf(y).exp()
    }

    /// Closed-form entropy `1 − Σ λ_i α_i` in nats.
    pub fn entropy(&self) -> T {
        T::one()
            - self
                .lambda
                .iter()
                .zip(&self.alpha)
                .map(|(&l, &a)| l * a)
                .sum::<T>()
    }

    /// Density tabulated on the quadrature grid.
    pub fn grid_density(&self) -> Vec<T> {
        self.grid.points.iter().map(|&x| self.pdf(x)).collect()
    }

    /// `max_i |∫ r_i p̂ − α_i|` on the model's grid.
    pub fn constraint_residual(&self) -> T {
        let basis = Basis::new(&self.spec, &self.grid);
        eval_dual(&basis, &self.grid, &self.alpha, &self.lambda)
            .map(|e| e.max_residual())
            .unwrap_or(T::infinity())
    }

    /// Number of free parameters charged by the description length:
    /// every multiplier plus each kernel's mean and width.
    pub fn parameter_count(&self) -> usize {
        self.spec.len() + 2 * self.spec.locals().len()
    }
}

/// Evaluates `p̂` at arbitrary points.
pub fn maxent_pdf<T: Scalar>(points: &[T], model: &MaxEntModel<T>) -> Vec<T> {
    points.iter().map(|&x| model.pdf(x)).collect()
}

pub fn entropy<T: Scalar>(model: &MaxEntModel<T>) -> T {
    model.entropy()
}

/// Two-part description length `−Σ ln p̂(y_t) + (κ/2) ln T`.
pub fn mdl_score<T: Scalar>(sample: &[T], model: &MaxEntModel<T>) -> T {
    let nll = -sample.iter().map(|&y| model.log_pdf(y)).sum::<T>();
    nll + mdl_penalty(model.parameter_count(), sample.len())
}

pub fn mdl_penalty<T: Scalar>(params: usize, samples: usize) -> T {
    T::lit(0.5) * T::from_usize(params).unwrap() * T::from_usize(samples).unwrap().ln()
}

#[cfg(test)]
mod tests {
    use super::super::measuring::GaussianKernel;
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn normal_sample(t: usize, seed: u64) -> Vec<f64> {
        let mut rng = crate::rng::stream(seed, 77, 0);
        (0..t).map(|_| rng.sample(StandardNormal)).collect()
    }

    #[test]
    fn constant_sample_is_singular() {
        let sample = vec![0.7f64; 200];
        let spec = MeasuringSpec::globals_only();
        let grid = QuadratureGrid::for_sample(&sample, 2048, 3.0);
        let alpha = sample_averages(&sample, &spec);
        let lambda0 = gaussian_lambda(0.0, 1.0, 4);
        let err = solve_lambda(&alpha, &spec, &grid, &lambda0).unwrap_err();
        assert!(matches!(err, IcaError::SingularJacobian { .. }), "{err:?}");
    }

    #[test]
    fn self_consistent_three_kernel_recovery() {
        // α generated from a known λ must lead Newton back to that λ.
        let spec = MeasuringSpec::new(vec![
            GaussianKernel::new(-1.0, 0.5).unwrap(),
            GaussianKernel::new(0.5, 0.6).unwrap(),
            GaussianKernel::new(1.8, 0.4).unwrap(),
        ])
        .unwrap();
        let grid = QuadratureGrid::uniform(-7.0, 7.0, 2048);
        let mut truth: Vec<f64> = vec![0.0, 0.1, -0.45, 0.2, 0.6, -0.3, 0.5];
        // normalize the truth so that it is a density on the grid
        let basis = Basis::new(&spec, &grid);
        let zero_alpha = vec![0.0; 7];
        let mass = eval_dual(&basis, &grid, &zero_alpha, &truth).unwrap().dual;
        truth[0] -= mass.ln();
        let alpha: Vec<f64> = {
            let e = eval_dual(&basis, &grid, &zero_alpha, &truth).unwrap();
            e.residual.clone()
        };
        assert!((alpha[0] - 1.0).abs() < 1e-12);
        let mut rng = crate::rng::stream(3, 1, 1);
        let lambda0: Vec<f64> = truth
            .iter()
            .map(|&l| l + 1e-3 * rng.random_range(-1.0..1.0))
            .collect();
        let got = solve_lambda(&alpha, &spec, &grid, &lambda0).unwrap();
        for (g, t) in got.iter().zip(&truth) {
            assert!((g - t).abs() < 1e-4, "{g} vs {t}");
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let spec = MeasuringSpec::<f64>::globals_only();
        let grid = QuadratureGrid::uniform(-5.0, 5.0, 64);
        assert!(matches!(
            solve_lambda(&[1.0, 0.0], &spec, &grid, &[0.0; 4]),
            Err(IcaError::Shape(_))
        ));
    }

    #[test]
    fn newton_iteration_cap_yields_no_convergence() {
        let sample = normal_sample(2000, 5);
        let spec = MeasuringSpec::globals_only();
        let grid = QuadratureGrid::for_sample(&sample, 512, 3.0);
        let alpha = sample_averages(&sample, &spec);
        let opts = NewtonOptions {
            max_iters: 1,
            ..NewtonOptions::default()
        };
        let far = [0.0, 0.0, -2.0, 0.0];
        assert!(matches!(
            solve_lambda_with(&alpha, &spec, &grid, &far, &opts),
            Err(IcaError::NoConvergence { .. })
        ));
    }

    #[test]
    fn mdl_penalty_arithmetic() {
        let sample = normal_sample(1000, 6);
        let grid = QuadratureGrid::for_sample(&sample, 2048, 3.0);
        let opts = NewtonOptions::default();
        let a = MaxEntModel::fit(
            &sample,
            MeasuringSpec::globals_only(),
            grid.clone(),
            &gaussian_lambda(0.0, 1.0, 4),
            &opts,
        )
        .unwrap();
        // same likelihood, one extra kernel's worth of parameters
        let mut b = a.clone();
        b.spec = MeasuringSpec::new(vec![GaussianKernel::new(0.0, 1.0).unwrap()]).unwrap();
        b.lambda.push(0.0);
        b.alpha.push(0.0);
        let diff = mdl_score(&sample, &b) - mdl_score(&sample, &a);
        assert!((diff - 1.5 * (1000f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn nll_equals_sample_entropy_identity() {
        let sample = normal_sample(3000, 8);
        let grid = QuadratureGrid::for_sample(&sample, 2048, 3.0);
        let m = MaxEntModel::fit(
            &sample,
            MeasuringSpec::globals_only(),
            grid,
            &gaussian_lambda(0.0, 1.0, 4),
            &NewtonOptions::default(),
        )
        .unwrap();
        let direct = mdl_score(&sample, &m) - mdl_penalty::<f64>(m.parameter_count(), sample.len());
        assert!((direct - 3000.0 * m.entropy()).abs() < 1e-8 * 3000.0);
    }
}
