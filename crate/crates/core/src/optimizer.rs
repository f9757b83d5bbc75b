//! Decoupled unit-sphere gradient descent on the maxent mutual-information
//! cost.
//!
//! Each outer iteration fits a density to every current estimate
//! `y_m = w_mᵀ z`, takes the decoupled gradient of `Σ H(y_n) − ln|det W|`
//! with respect to `w_m`, projects it onto the tangent plane of the unit
//! sphere and steps. Sequential mode updates rows in place (Gauss–Seidel);
//! parallel mode computes every row from the iteration-start snapshot
//! (Jacobi) on a worker pool and joins before the termination test.

use std::time::{Duration, Instant};

use log::{debug, warn};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::decoupler::perp_vector;
use crate::emk_density::{
    refresh_model, select_kernels_with, MaxEntModel, SelectionOptions, MAX_LOCAL_KERNELS,
};
use crate::error::{IcaError, Result};
use crate::linalg::{householder_qr, inv_sqrt_spd, Lu};
use crate::preprocess::{center_and_whiten, WhiteningTransform};
use crate::rng::{stream, tag};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitStrategy {
    /// Haar-distributed orthogonal matrix drawn from the seed.
    RandomOrthogonal,
    /// A short symmetric fixed-point run with a `tanh` nonlinearity.
    FixedNonlinearity,
    /// `W₀ = I`.
    Identity,
}

impl InitStrategy {
    pub fn name(self) -> &'static str {
        match self {
            InitStrategy::RandomOrthogonal => "random",
            InitStrategy::FixedNonlinearity => "fixed-nonlinearity",
            InitStrategy::Identity => "identity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcaConfig<T> {
    pub gamma: T,
    pub lag_k: usize,
    pub delta: T,
    pub max_iters: usize,
    pub max_local_kernels: usize,
    /// Iterations between full kernel re-selection; in between, only the
    /// multipliers are refreshed.
    pub refit_period: usize,
    /// Parallel lanes; `0` or `1` runs on the calling thread.
    pub workers: usize,
    pub seed: u64,
    pub init: InitStrategy,
    /// Use the snapshot (Jacobi) sweep even without a worker pool.
    pub force_jacobi: bool,
    /// Ignore the termination test and run exactly `max_iters` iterations.
    pub fixed_iterations: bool,
}

impl<T: Scalar> Default for IcaConfig<T> {
    fn default() -> Self {
        Self {
            gamma: T::lit(0.01),
            lag_k: 8,
            delta: T::lit(1e-6),
            max_iters: 200,
            max_local_kernels: MAX_LOCAL_KERNELS,
            refit_period: 1,
            workers: 0,
            seed: 0,
            init: InitStrategy::FixedNonlinearity,
            force_jacobi: false,
            fixed_iterations: false,
        }
    }
}

impl<T: Scalar> IcaConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(IcaError::InvalidParameter(msg.to_string()));
        if !(self.gamma > T::zero()) {
            return bad("gamma must be positive");
        }
        if self.lag_k < 1 {
            return bad("lag_k must be at least 1");
        }
        if !(self.delta > T::zero()) {
            return bad("delta must be positive");
        }
        if self.max_iters < self.lag_k {
            return bad("max_iters must be at least lag_k");
        }
        if self.max_local_kernels > MAX_LOCAL_KERNELS {
            return bad("at most 5 local kernels are supported");
        }
        if self.refit_period < 1 {
            return bad("refit_period must be at least 1");
        }
        Ok(())
    }

    /// Whether rows are updated from an iteration-start snapshot.
    pub fn jacobi(&self) -> bool {
        self.force_jacobi || self.workers >= 2
    }

    fn selection(&self) -> SelectionOptions<T> {
        SelectionOptions::default().with_max_kernels(self.max_local_kernels)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub whitening: Duration,
    pub init: Duration,
    pub iterations: Duration,
}

#[derive(Debug, Clone)]
pub struct DemixingState<T> {
    /// Demixing matrix acting on whitened data; rows have unit norm.
    pub w: Array2<T>,
    /// Density model of each row's estimate at the final `w`.
    pub models: Vec<MaxEntModel<T>>,
    pub cost_trace: Vec<T>,
    pub iterations_run: usize,
    pub converged: bool,
    /// Rows re-drawn after the demixing matrix collapsed.
    pub reseeded_rows: usize,
    /// Row fits that failed and fell back to the previous model.
    pub stale_fits: usize,
    pub timings: PhaseTimings,
}

impl<T: Scalar> DemixingState<T> {
    /// Source estimates `Y = W Z` for whitened data.
    pub fn estimates(&self, z: ArrayView2<'_, T>) -> Array2<T> {
        self.w.dot(&z)
    }
}

/// Haar-random orthogonal matrix.
pub fn random_orthogonal<T: Scalar>(n: usize, seed: u64) -> Array2<T> {
    let mut rng = stream(seed, tag::INIT, 0);
    let g = Array2::from_shape_fn((n, n), |_| T::lit(rng.sample::<f64, _>(StandardNormal)));
    let (mut q, r) = householder_qr(g.view());
    for j in 0..n {
        if r[(j, j)] < T::zero() {
            q.column_mut(j).mapv_inplace(|v| -v);
        }
    }
    q
}

/// `(W Wᵀ)^{-1/2} W`
fn symmetric_decorrelation<T: Scalar>(w: &Array2<T>) -> Option<Array2<T>> {
    let s = inv_sqrt_spd(w.dot(&w.t()).view())?;
    Some(s.dot(w))
}

fn fixed_nonlinearity<T: Scalar>(z: ArrayView2<'_, T>, seed: u64) -> Array2<T> {
    const MAX_ITERS: usize = 50;
    let n = z.nrows();
    let t = T::from_usize(z.ncols()).unwrap();
    let mut w = random_orthogonal::<T>(n, seed);
    for _ in 0..MAX_ITERS {
        let g = w.dot(&z).mapv(|v| v.tanh());
        let gp = g.mapv(|v| T::one() - v * v).mean_axis(Axis(1)).unwrap();
        let mut next = g.dot(&z.t()) / t;
        for (mut row, (&d, old)) in next.rows_mut().into_iter().zip(gp.iter().zip(w.rows())) {
            row.scaled_add(-d, &old);
        }
        let Some(next) = symmetric_decorrelation(&next) else {
            break;
        };
        let change = next
            .rows()
            .into_iter()
            .zip(w.rows())
            .map(|(a, b)| (T::one() - a.dot(&b).abs()).abs())
            .fold(T::zero(), T::max);
        w = next;
        if change < T::lit(1e-6) {
            break;
        }
    }
    w
}

/// Initial demixing matrix with orthonormal rows.
pub fn init_demixing<T: Scalar>(
    z: ArrayView2<'_, T>,
    strategy: InitStrategy,
    seed: u64,
) -> Array2<T> {
    match strategy {
        InitStrategy::RandomOrthogonal => random_orthogonal(z.nrows(), seed),
        InitStrategy::FixedNonlinearity => fixed_nonlinearity(z, seed),
        InitStrategy::Identity => Array2::eye(z.nrows()),
    }
}

/// `u = (I − w wᵀ) g`
pub fn project_to_tangent<T: Scalar>(w: ArrayView1<'_, T>, g: ArrayView1<'_, T>) -> Array1<T> {
    let along = w.dot(&g);
    let mut u = g.to_owned();
    u.scaled_add(-along, &w);
    u
}

/// Step `w − γu` retracted back onto the unit sphere.
pub fn update_row<T: Scalar>(
    w: ArrayView1<'_, T>,
    u: ArrayView1<'_, T>,
    gamma: T,
) -> Result<Array1<T>> {
    let mut next = w.to_owned();
    next.scaled_add(-gamma, &u);
    let norm = next.dot(&next).sqrt();
    if !(norm >= T::lit(1e-14)) {
        return Err(IcaError::StepCollapse);
    }
    next.mapv_inplace(|v| v / norm);
    Ok(next)
}

fn row_estimate<T: Scalar>(w: ArrayView2<'_, T>, z: ArrayView2<'_, T>, m: usize) -> Vec<T> {
    z.t().dot(&w.row(m)).to_vec()
}

/// Gradient of the cost with respect to `w_m` with the multipliers held
/// fixed: `−Σ λ_i E{r_i′(y_m) z} − h_m / (h_mᵀ w_m)`.
pub fn decoupled_gradient<T: Scalar>(
    w: ArrayView2<'_, T>,
    z: ArrayView2<'_, T>,
    m: usize,
    model: &MaxEntModel<T>,
) -> Result<Array1<T>> {
    let perp = perp_vector(w, m)?;
    let along = perp.projection(w);
    let y = row_estimate(w, z, m);
    let score = Array1::from_iter(
        y.iter()
            .map(|&v| model.spec.weighted_deriv(v, &model.lambda)),
    );
    let t = T::from_usize(z.ncols()).unwrap();
    let mut g = z.dot(&score) / (-t);
    g.scaled_add(-T::one() / along, &perp.h);
    Ok(g)
}

/// `Σ_n H(y_n) − ln|det W|`, dropping the data-entropy constant.
pub fn cost<T: Scalar>(w: ArrayView2<'_, T>, models: &[MaxEntModel<T>]) -> Result<T> {
    if models.len() != w.nrows() {
        return Err(IcaError::Shape(format!(
            "{} models for {} rows",
            models.len(),
            w.nrows()
        )));
    }
    let lu = Lu::new(w);
    let ln_det = lu.ln_abs_det();
    let floor = T::lit(1e-300).max(T::min_positive_value());
    if !(ln_det >= floor.ln()) {
        return Err(IcaError::DegenerateDemixing("determinant underflow".into()));
    }
    Ok(models.iter().map(|m| m.entropy()).sum::<T>() - ln_det)
}

fn fit_row<T: Scalar>(
    y: &[T],
    previous: Option<&MaxEntModel<T>>,
    reselect: bool,
    opts: &SelectionOptions<T>,
) -> Result<MaxEntModel<T>> {
    match previous {
        Some(prev) if !reselect => {
            refresh_model(y, prev, opts).or_else(|_| select_kernels_with(y, opts).map(|s| s.model))
        }
        _ => select_kernels_with(y, opts).map(|s| s.model),
    }
}

/// Replaces row `m` by a random unit vector orthogonal to the other rows.
fn reseed_row<T: Scalar>(w: ArrayView2<'_, T>, m: usize, seed: u64, counter: u64) -> Array1<T> {
    let n = w.nrows();
    let mut rng = stream(seed, tag::RESEED, counter);
    let mut basis: Vec<Array1<T>> = Vec::new();
    for (i, row) in w.rows().into_iter().enumerate() {
        if i == m {
            continue;
        }
        let mut v = row.to_owned();
        for b in &basis {
            let c = b.dot(&v);
            v.scaled_add(-c, b);
        }
        let norm = v.dot(&v).sqrt();
        if norm > T::lit(1e-8) {
            basis.push(v / norm);
        }
    }
    loop {
        let mut v = Array1::from_shape_fn(n, |_| T::lit(rng.sample::<f64, _>(StandardNormal)));
        for b in &basis {
            let c = b.dot(&v);
            v.scaled_add(-c, b);
        }
        let norm = v.dot(&v).sqrt();
        if norm > T::lit(1e-6) {
            return v / norm;
        }
    }
}

struct RowOutcome<T> {
    model: MaxEntModel<T>,
    row: Array1<T>,
    stale: bool,
    reseeded: bool,
}

/// One row's work unit: density fit, gradient against `w`, and update.
#[allow(clippy::too_many_arguments)]
fn row_step<T: Scalar>(
    w: ArrayView2<'_, T>,
    z: ArrayView2<'_, T>,
    m: usize,
    previous: Option<&MaxEntModel<T>>,
    reselect: bool,
    config: &IcaConfig<T>,
    opts: &SelectionOptions<T>,
    iteration: usize,
) -> Result<RowOutcome<T>> {
    let y = row_estimate(w, z, m);
    let (model, stale) = match fit_row(&y, previous, reselect, opts) {
        Ok(model) => (model, false),
        Err(e) => match previous {
            Some(prev) => {
                debug!("row {m} fit failed at iteration {iteration}: {e}; reusing previous model");
                (prev.clone(), true)
            }
            None => {
                return Err(IcaError::DensityFailure(format!(
                    "row {m} at iteration {iteration}: {e}"
                )))
            }
        },
    };
    let w_m = w.row(m);
    let (row, reseeded) = match decoupled_gradient(w, z, m, &model) {
        Ok(g) => {
            let u = project_to_tangent(w_m, g.view());
            let mut gamma = config.gamma;
            let mut next = None;
            for _ in 0..30 {
                match update_row(w_m, u.view(), gamma) {
                    Ok(r) => {
                        next = Some(r);
                        break;
                    }
                    Err(_) => gamma *= T::lit(0.5),
                }
            }
            (next.unwrap_or_else(|| w_m.to_owned()), false)
        }
        Err(IcaError::DegenerateDemixing(_)) => {
            let counter = (iteration as u64) * (w.nrows() as u64) + m as u64;
            (reseed_row(w, m, config.seed, counter), true)
        }
        Err(e) => return Err(e),
    };
    Ok(RowOutcome {
        model,
        row,
        stale,
        reseeded,
    })
}

/// Runs the separation on whitened data from a given starting matrix.
pub fn run_ica_whitened<T: Scalar>(
    z: ArrayView2<'_, T>,
    w0: Array2<T>,
    config: &IcaConfig<T>,
) -> Result<DemixingState<T>> {
    config.validate()?;
    let n = z.nrows();
    if w0.dim() != (n, n) {
        return Err(IcaError::Shape(format!(
            "initial W is {:?}, expected {n}x{n}",
            w0.dim()
        )));
    }
    let opts = config.selection();
    let jacobi = config.jacobi();
    let pool = if config.workers >= 2 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.workers)
                .build()
                .map_err(|e| IcaError::InvalidParameter(format!("worker pool: {e}")))?,
        )
    } else {
        None
    };

    let start = Instant::now();
    let mut w = w0;
    let mut models: Vec<Option<MaxEntModel<T>>> = vec![None; n];
    let mut cost_trace: Vec<T> = Vec::with_capacity(config.max_iters);
    let mut converged = false;
    let mut reseeded_rows = 0;
    let mut stale_fits = 0;

    for iter in 0..config.max_iters {
        let reselect = iter % config.refit_period == 0;
        let ln_det = Lu::new(w.view()).ln_abs_det();
        let outcomes: Vec<RowOutcome<T>> = if jacobi {
            let snapshot = w.view();
            let work = |m: usize| {
                row_step(
                    snapshot,
                    z,
                    m,
                    models[m].as_ref(),
                    reselect,
                    config,
                    &opts,
                    iter,
                )
            };
            match &pool {
                Some(pool) => {
                    pool.install(|| (0..n).into_par_iter().map(work).collect::<Result<Vec<_>>>())?
                }
                None => (0..n).map(work).collect::<Result<Vec<_>>>()?,
            }
        } else {
            let mut out = Vec::with_capacity(n);
            for (m, model) in models.iter().enumerate() {
                let o = row_step(
                    w.view(),
                    z,
                    m,
                    model.as_ref(),
                    reselect,
                    config,
                    &opts,
                    iter,
                )?;
                w.row_mut(m).assign(&o.row);
                out.push(o);
            }
            out
        };

        // join
        let stale_now = outcomes.iter().filter(|o| o.stale).count();
        if stale_now == n && n > 0 {
            return Err(IcaError::DensityFailure(format!(
                "every row's density fit failed at iteration {iter}"
            )));
        }
        stale_fits += stale_now;
        let mut entropy_sum = T::zero();
        for (m, o) in outcomes.into_iter().enumerate() {
            entropy_sum += o.model.entropy();
            reseeded_rows += usize::from(o.reseeded);
            if jacobi {
                w.row_mut(m).assign(&o.row);
            }
            models[m] = Some(o.model);
        }
        let j = if ln_det.is_finite() {
            entropy_sum - ln_det
        } else {
            T::infinity()
        };
        cost_trace.push(j);

        if !config.fixed_iterations && iter >= config.lag_k {
            let lagged = cost_trace[iter - config.lag_k];
            if (j - lagged).abs() < config.delta {
                converged = true;
                break;
            }
        }
    }

    // models describing the returned W
    let final_fit = |m: usize| -> Result<MaxEntModel<T>> {
        let y = row_estimate(w.view(), z, m);
        fit_row(&y, models[m].as_ref(), false, &opts).or_else(|e| {
            models[m]
                .clone()
                .ok_or_else(|| IcaError::DensityFailure(format!("final fit of row {m}: {e}")))
        })
    };
    let final_models = match &pool {
        Some(pool) => pool.install(|| {
            (0..n)
                .into_par_iter()
                .map(final_fit)
                .collect::<Result<Vec<_>>>()
        })?,
        None => (0..n).map(final_fit).collect::<Result<Vec<_>>>()?,
    };

    Ok(DemixingState {
        w,
        models: final_models,
        iterations_run: cost_trace.len(),
        cost_trace,
        converged,
        reseeded_rows,
        stale_fits,
        timings: PhaseTimings {
            iterations: start.elapsed(),
            ..PhaseTimings::default()
        },
    })
}

/// Centers and whitens raw mixtures, initializes `W` and runs the
/// separation. Returns the final state and the whitening transform; the
/// overall demixing of raw data is `state.w · transform.forward`.
pub fn run_ica<T: Scalar>(
    x: ArrayView2<'_, T>,
    config: &IcaConfig<T>,
) -> Result<(DemixingState<T>, WhiteningTransform<T>)> {
    config.validate()?;
    let (n, t) = x.dim();
    if t < 10 * n {
        warn!("only {t} samples for {n} channels; separation may be unreliable");
    }
    let t0 = Instant::now();
    let (z, transform) = center_and_whiten(x)?;
    let whitening = t0.elapsed();
    let t1 = Instant::now();
    let w0 = init_demixing(z.view(), config.init, config.seed);
    let init = t1.elapsed();
    let mut state = run_ica_whitened(z.view(), w0, config)?;
    state.timings.whitening = whitening;
    state.timings.init = init;
    Ok((state, transform))
}
