use log::debug;

use super::measuring::{GaussianKernel, MeasuringSpec, MAX_LOCAL_KERNELS};
use super::model::{gaussian_lambda, mdl_penalty, MaxEntModel, NewtonOptions};
use super::quadrature::{mean_std, QuadratureGrid, DEFAULT_GRID_POINTS, DEFAULT_MARGIN_STDS};
use crate::error::{IcaError, Result};
use crate::Scalar;

/// Below this sample size only the global functions are fitted.
pub const MIN_KERNEL_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOptions<T> {
    pub max_local_kernels: usize,
    pub grid_points: usize,
    pub margin_stds: T,
    pub histogram_bins: usize,
    /// A candidate within this many bandwidths of an existing kernel stops the search.
    pub duplicate_guard: T,
    pub newton: NewtonOptions<T>,
}

impl<T: Scalar> Default for SelectionOptions<T> {
    fn default() -> Self {
        Self {
            max_local_kernels: MAX_LOCAL_KERNELS,
            grid_points: DEFAULT_GRID_POINTS,
            margin_stds: T::lit(DEFAULT_MARGIN_STDS),
            histogram_bins: 128,
            duplicate_guard: T::lit(0.25),
            newton: NewtonOptions::default(),
        }
    }
}

impl<T: Scalar> SelectionOptions<T> {
    pub fn with_max_kernels(mut self, k: usize) -> Self {
        self.max_local_kernels = k.min(MAX_LOCAL_KERNELS);
        self
    }
}

/// Outcome of the greedy MDL kernel search.
#[derive(Debug, Clone)]
pub struct KernelSelection<T> {
    pub model: MaxEntModel<T>,
    /// Description length of every model that was fitted, in order.
    pub mdl_trace: Vec<T>,
    /// Set when the sample was too short for kernel selection.
    pub small_sample: bool,
}

impl<T: Scalar> KernelSelection<T> {
    pub fn spec(&self) -> &MeasuringSpec<T> {
        &self.model.spec
    }
}

/// Silverman's rule-of-thumb bandwidth `1.06 · std · T^{−1/5}`.
pub fn silverman_bandwidth<T: Scalar>(std: T, samples: usize) -> T {
    T::lit(1.06) * std * T::from_usize(samples).unwrap().powf(T::lit(-0.2))
}

/// Unit-area histogram over `[lo, hi]`; returns bin centers and densities.
pub fn histogram_density<T: Scalar>(sample: &[T], lo: T, hi: T, bins: usize) -> (Vec<T>, Vec<T>) {
    let width = (hi - lo) / T::from_usize(bins).unwrap();
    let mut counts = vec![0usize; bins];
    for &y in sample {
        let pos = ((y - lo) / width).floor().to_isize().unwrap_or(0);
        let idx = pos.clamp(0, bins as isize - 1) as usize;
        counts[idx] += 1;
    }
    let norm = T::from_usize(sample.len()).unwrap() * width;
    let centers = (0..bins)
        .map(|i| lo + width * (T::from_usize(i).unwrap() + T::lit(0.5)))
        .collect();
    let dens = counts
        .iter()
        .map(|&c| T::from_usize(c).unwrap() / norm)
        .collect();
    (centers, dens)
}

/// Fits the globals-only model, then greedily adds Gaussian kernels where
/// the fitted density departs most from the histogram, keeping each while
/// it lowers the description length.
pub fn select_kernels<T: Scalar>(sample: &[T]) -> Result<KernelSelection<T>> {
    select_kernels_with(sample, &SelectionOptions::default())
}

pub fn select_kernels_with<T: Scalar>(
    sample: &[T],
    opts: &SelectionOptions<T>,
) -> Result<KernelSelection<T>> {
    let t = sample.len();
    if t < 2 {
        return Err(IcaError::TooFewSamples { got: t, need: 2 });
    }
    if sample.iter().any(|v| !v.is_finite()) {
        return Err(IcaError::InvalidData(
            "non-finite value in density sample".into(),
        ));
    }
    let (mean, std) = mean_std(sample);
    if !(std > T::zero()) {
        return Err(IcaError::SingularJacobian {
            condition: f64::INFINITY,
        });
    }
    let grid = QuadratureGrid::for_sample(sample, opts.grid_points, opts.margin_stds);
    let base = MaxEntModel::fit(
        sample,
        MeasuringSpec::globals_only(),
        grid,
        &gaussian_lambda(mean, std * std, 4),
        &opts.newton,
    )?;
    let score = |m: &MaxEntModel<T>| {
        T::from_usize(t).unwrap() * m.entropy() + mdl_penalty(m.parameter_count(), t)
    };
    let mut best_mdl = score(&base);
    let mut trace = vec![best_mdl];
    if t < MIN_KERNEL_SAMPLES {
        return Ok(KernelSelection {
            model: base,
            mdl_trace: trace,
            small_sample: true,
        });
    }

    let mut best = base;
    let sigma = silverman_bandwidth(std, t);
    let (centers, hist) =
        histogram_density(sample, best.grid.lo(), best.grid.hi(), opts.histogram_bins);
    let max_kernels = opts.max_local_kernels.min(MAX_LOCAL_KERNELS);

    while best.spec.locals().len() < max_kernels {
        let mut at = 0;
        let mut worst = T::neg_infinity();
        for (i, (&c, &h)) in centers.iter().zip(&hist).enumerate() {
            let dev = (best.pdf(c) - h).abs();
            if dev > worst {
                worst = dev;
                at = i;
            }
        }
        let mu = centers[at];
        if best
            .spec
            .locals()
            .iter()
            .any(|k| (k.mu - mu).abs() < opts.duplicate_guard * k.sigma)
        {
            break;
        }
        let spec = best.spec.with_kernel(GaussianKernel::new(mu, sigma)?)?;
        let mut lambda0 = best.lambda.clone();
        lambda0.push(T::zero());
        let candidate =
            match MaxEntModel::fit(sample, spec, best.grid.clone(), &lambda0, &opts.newton) {
                Ok(m) => m,
                Err(e) => {
                    debug!(
                        "kernel {} at {mu} rejected: {e}",
                        best.spec.locals().len() + 1
                    );
                    break;
                }
            };
        let mdl = score(&candidate);
        trace.push(mdl);
        if mdl < best_mdl {
            best_mdl = mdl;
            best = candidate;
        } else {
            break;
        }
    }
    Ok(KernelSelection {
        model: best,
        mdl_trace: trace,
        small_sample: false,
    })
}

/// Refits the multipliers of an existing model's spec to a new sample,
/// warm-started from its current multipliers.
pub fn refresh_model<T: Scalar>(
    sample: &[T],
    previous: &MaxEntModel<T>,
    opts: &SelectionOptions<T>,
) -> Result<MaxEntModel<T>> {
    let grid = QuadratureGrid::for_sample(sample, opts.grid_points, opts.margin_stds);
    MaxEntModel::fit(
        sample,
        previous.spec.clone(),
        grid,
        &previous.lambda,
        &opts.newton,
    )
}
