//! Synthetic benchmark sources and random mixing.
//!
//! Generalized Gaussian components use the density
//! `∝ exp(−|x − μ|^{2β} / (2σ^{2β}))`, sampled exactly through
//! `x = μ + σ·S·(2G)^{1/(2β)}` with `S = ±1` and `G ~ Gamma(1/(2β), 1)`.

use log::info;
use ndarray::{Array2, ArrayViewMut1};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{IcaError, Result};
use crate::linalg::condition_number;
use crate::rng::{stream, tag};
use crate::Scalar;

pub const MIN_SHAPE: f64 = 0.25;
pub const MAX_SHAPE: f64 = 4.0;
pub const MEANS_K4: [f64; 4] = [-8.0, -4.0, 4.0, 8.0];
pub const MEANS_K5: [f64; 5] = [-10.0, -5.0, 0.0, 5.0, 10.0];
pub const MAX_CONDITION: f64 = 1e6;
pub const MAX_MIXING_DRAWS: usize = 100;

/// Parameters of one source's generalized Gaussian mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct GgdMixtureSpec {
    pub weights: Vec<f64>,
    pub shapes: Vec<f64>,
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl GgdMixtureSpec {
    pub fn components(&self) -> usize {
        self.weights.len()
    }

    /// Draws `K ∈ {4, 5}`, weights from `(0, 1)` normalized to one, shapes
    /// uniformly in `(0.25, 4)` and unit scales.
    pub fn random(rng: &mut impl Rng) -> Self {
        let means: Vec<f64> = if rng.random_bool(0.5) {
            MEANS_K4.to_vec()
        } else {
            MEANS_K5.to_vec()
        };
        let k = means.len();
        let mut weights: Vec<f64> = (0..k).map(|_| open01(rng)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let shapes = (0..k)
            .map(|_| MIN_SHAPE + (MAX_SHAPE - MIN_SHAPE) * open01(rng))
            .collect();
        Self {
            weights,
            shapes,
            means,
            scales: vec![1.0; k],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.components();
        let ok = (k == 4 && self.means == MEANS_K4) || (k == 5 && self.means == MEANS_K5);
        if !ok || self.shapes.len() != k || self.scales.len() != k {
            return Err(IcaError::InvalidParameter(
                "GGD mixture needs K ∈ {4,5} with the fixed mean set".into(),
            ));
        }
        let sum: f64 = self.weights.iter().sum();
        if self.weights.iter().any(|&w| w <= 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(IcaError::InvalidParameter(
                "mixture weights must be positive and sum to one".into(),
            ));
        }
        for (&b, &s) in self.shapes.iter().zip(&self.scales) {
            check_ggd(b, s)?;
        }
        Ok(())
    }

    pub fn sample(&self, rng: &mut impl Rng, t: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let mut cdf = Vec::with_capacity(self.components());
        let mut acc = 0.0;
        for &w in &self.weights {
            acc += w;
            cdf.push(acc);
        }
        let gammas = self
            .shapes
            .iter()
            .map(|&b| {
                Gamma::new(1.0 / (2.0 * b), 1.0)
                    .map_err(|e| IcaError::InvalidParameter(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((0..t)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * acc;
                let c = cdf.iter().position(|&p| u < p).unwrap_or(cdf.len() - 1);
                ggd_draw(
                    rng,
                    &gammas[c],
                    self.shapes[c],
                    self.means[c],
                    self.scales[c],
                )
            })
            .collect())
    }
}

fn open01(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn check_ggd(beta: f64, sigma: f64) -> Result<()> {
    if !(MIN_SHAPE..=MAX_SHAPE).contains(&beta) {
        return Err(IcaError::InvalidParameter(format!(
            "GGD shape {beta} outside [{MIN_SHAPE}, {MAX_SHAPE}]"
        )));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(IcaError::InvalidParameter(format!(
            "GGD scale {sigma} must be positive"
        )));
    }
    Ok(())
}

#[inline]
fn ggd_draw(rng: &mut impl Rng, gamma: &Gamma<f64>, beta: f64, mu: f64, sigma: f64) -> f64 {
    let g = gamma.sample(rng);
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    mu + sigma * sign * (2.0 * g).powf(1.0 / (2.0 * beta))
}

/// `t` draws from a single generalized Gaussian.
pub fn sample_ggd<T: Scalar>(
    beta: f64,
    mu: f64,
    sigma: f64,
    t: usize,
    seed: u64,
) -> Result<Vec<T>> {
    check_ggd(beta, sigma)?;
    let gamma = Gamma::new(1.0 / (2.0 * beta), 1.0)
        .map_err(|e| IcaError::InvalidParameter(e.to_string()))?;
    let mut rng = stream(seed, tag::SOURCES, u64::MAX);
    Ok((0..t)
        .map(|_| T::lit(ggd_draw(&mut rng, &gamma, beta, mu, sigma)))
        .collect())
}

/// Shifts and scales a row to zero mean and unit `1/T` variance.
pub fn standardize_row<T: Scalar>(mut row: ArrayViewMut1<'_, T>) {
    let n = T::from_usize(row.len()).unwrap();
    for _ in 0..2 {
        let mean = row.sum() / n;
        row.mapv_inplace(|v| v - mean);
    }
    let var = row.iter().map(|&v| v * v).sum::<T>() / n;
    if var > T::zero() {
        let s = var.sqrt();
        row.mapv_inplace(|v| v / s);
    }
}

pub fn standardize_rows<T: Scalar>(s: &mut Array2<T>) {
    for row in s.rows_mut() {
        standardize_row(row);
    }
}

fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    stream(seed, tag::SOURCES, row as u64)
}

/// `n` standardized GGD-mixture sources of length `t`.
pub fn gen_ggd_mixture_sources<T: Scalar>(
    n: usize,
    t: usize,
    seed: u64,
) -> Result<(Array2<T>, Vec<GgdMixtureSpec>)> {
    if n == 0 || t == 0 {
        return Err(IcaError::InvalidParameter(
            "need at least one source and one sample".into(),
        ));
    }
    let mut out = Array2::<T>::zeros((n, t));
    let mut specs = Vec::with_capacity(n);
    for (i, mut row) in out.rows_mut().into_iter().enumerate() {
        let mut rng = row_rng(seed, i);
        let spec = GgdMixtureSpec::random(&mut rng);
        let values = spec.sample(&mut rng, t)?;
        row.iter_mut().zip(values).for_each(|(d, v)| *d = T::lit(v));
        standardize_row(row);
        specs.push(spec);
    }
    Ok((out, specs))
}

/// Raw (unstandardized) Gamma sources: row `i` has shape `i + 1`.
pub fn gamma_sources_raw(n: usize, t: usize, seed: u64) -> Result<Array2<f64>> {
    if n == 0 || n > 8 {
        return Err(IcaError::InvalidParameter(format!(
            "Gamma benchmark supports 1..=8 sources, got {n}"
        )));
    }
    if t == 0 {
        return Err(IcaError::InvalidParameter(
            "need at least one sample".into(),
        ));
    }
    let mut out = Array2::<f64>::zeros((n, t));
    for (i, mut row) in out.rows_mut().into_iter().enumerate() {
        let mut rng = row_rng(seed, i);
        let g = Gamma::new((i + 1) as f64, 1.0)
            .map_err(|e| IcaError::InvalidParameter(e.to_string()))?;
        row.iter_mut().for_each(|d| *d = g.sample(&mut rng));
    }
    Ok(out)
}

/// Standardized Gamma sources with shapes `1..=n`.
pub fn gen_gamma_sources<T: Scalar>(n: usize, t: usize, seed: u64) -> Result<Array2<T>> {
    let mut s = gamma_sources_raw(n, t, seed)?.mapv(T::lit);
    standardize_rows(&mut s);
    Ok(s)
}

pub const TEXTURE_NAMES: [&str; 3] = ["checkerboard", "gradient", "noise"];

/// Three 8-bit grayscale `side × side` textures, one image per row in
/// row-major pixel order: a checkerboard, a linear ramp and uniform noise.
/// The seed moves the checkerboard phase, turns the ramp and draws the noise.
pub fn texture_images(side: usize, seed: u64) -> Result<Array2<u8>> {
    if side < 2 {
        return Err(IcaError::InvalidParameter(format!(
            "texture side {side} is too small"
        )));
    }
    let mut rng = stream(seed, tag::TEXTURE, 0);
    let cell = (side / 8).max(1);
    let (dx, dy) = (rng.random_range(0..2 * cell), rng.random_range(0..2 * cell));
    let angle: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    let (c, s) = (angle.cos(), angle.sin());
    let span = (c + s) * (side - 1) as f64;
    let mut out = Array2::<u8>::zeros((3, side * side));
    for r in 0..side {
        for col in 0..side {
            let k = r * side + col;
            out[(0, k)] = if ((r + dy) / cell + (col + dx) / cell).is_multiple_of(2) {
                32
            } else {
                224
            };
            out[(1, k)] = ((col as f64 * c + r as f64 * s) / span * 255.0).round() as u8;
            out[(2, k)] = rng.random::<u8>();
        }
    }
    Ok(out)
}

/// Standard-normal `n × n` mixing matrix, redrawn while its condition number
/// exceeds `1e6`.
pub fn random_mixing<T: Scalar>(n: usize, seed: u64) -> Result<Array2<T>> {
    if n < 2 {
        return Err(IcaError::InvalidParameter(
            "mixing needs at least two sources".into(),
        ));
    }
    let mut rng = stream(seed, tag::MIXING, 0);
    for attempt in 0..MAX_MIXING_DRAWS {
        let a = Array2::from_shape_fn((n, n), |_| rng.sample::<f64, _>(StandardNormal));
        let cond = condition_number(a.view());
        if cond <= MAX_CONDITION {
            return Ok(a.mapv(T::lit));
        }
        info!("mixing draw {attempt} rejected (condition number {cond:e})");
    }
    Err(IcaError::IllConditioned {
        attempts: MAX_MIXING_DRAWS,
    })
}
