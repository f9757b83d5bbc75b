//! Maximum-entropy density estimation with global and adaptive local
//! measuring functions.
//!
//! A density is represented as `p̂(y) = exp(−1 + Σ λ_i r_i(y))` where the
//! `r_i` are the four global functions `1, y, y², y/(1+y²)` followed by up to
//! five Gaussian kernels. Multipliers are solved on a trapezoid grid by
//! Newton iteration; the number of kernels is chosen by description length.

mod measuring;
mod model;
mod quadrature;
mod select;

pub use measuring::{
    eval_measuring, eval_measuring_deriv, GaussianKernel, GlobalFunction, MeasuringSpec, GLOBALS,
    GLOBAL_COUNT, MAX_LOCAL_KERNELS,
};
pub use model::{
    entropy, gaussian_lambda, maxent_pdf, mdl_penalty, mdl_score, sample_averages, solve_lambda,
    solve_lambda_with, MaxEntModel, NewtonOptions,
};
pub use quadrature::{mean_std, QuadratureGrid, DEFAULT_GRID_POINTS, DEFAULT_MARGIN_STDS};
pub use select::{
    histogram_density, refresh_model, select_kernels, select_kernels_with, silverman_bandwidth,
    KernelSelection, SelectionOptions, MIN_KERNEL_SAMPLES,
};
