//! Blind source separation by entropy maximization with kernels.
//!
//! The crate estimates a demixing matrix `W` for linear mixtures `x = A s` by
//! minimizing `Σ_n H(y_n) − ln|det W|`, where every marginal entropy comes
//! from a maximum-entropy density fitted with four global measuring
//! functions and up to five adaptive Gaussian kernels. Rows of `W` are
//! optimized separately on the unit sphere, which also allows a
//! deterministic data-parallel sweep.
//!
//! All numerical code is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64`/`*32` aliases below name the common instantiations.
//!
//! ```
//! use ica_emk::{experiment, IcaConfig64};
//!
//! let trial = experiment::make_trial::<f64>(experiment::SourceKind::Gamma, 2, 2000, 1).unwrap();
//! let config = IcaConfig64 { max_iters: 20, ..Default::default() };
//! let out = experiment::separate_known(&trial.sources, &trial.mixing, &config).unwrap();
//! assert!(out.report.isr_db < -10.0);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decoupler;
pub mod emk_density;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod metrics;
pub mod optimizer;
pub mod preprocess;
pub mod rng;
mod scalar;
pub mod sources_bench;

pub use error::{IcaError, Result};
pub use scalar::Scalar;

pub use decoupler::{perp_vector, PerpVector};
pub use emk_density::{select_kernels, solve_lambda, KernelSelection, MaxEntModel, MeasuringSpec};
pub use metrics::{amdahl_speedup, gain_matrix, isr, pair_sources, SeparationReport};
pub use optimizer::{run_ica, DemixingState, IcaConfig, InitStrategy};
pub use preprocess::{center, whiten, WhiteningTransform};

/// Observations, sources or estimates: one row per channel.
pub type SampleMatrix<T> = ndarray::Array2<T>;

pub type SampleMatrix64 = SampleMatrix<f64>;
pub type SampleMatrix32 = SampleMatrix<f32>;
pub type MeasuringSpec64 = MeasuringSpec<f64>;
pub type MeasuringSpec32 = MeasuringSpec<f32>;
pub type MaxEntModel64 = MaxEntModel<f64>;
pub type MaxEntModel32 = MaxEntModel<f32>;
pub type IcaConfig64 = IcaConfig<f64>;
pub type IcaConfig32 = IcaConfig<f32>;
pub type DemixingState64 = DemixingState<f64>;
pub type DemixingState32 = DemixingState<f32>;
pub type WhiteningTransform64 = WhiteningTransform<f64>;
pub type WhiteningTransform32 = WhiteningTransform<f32>;
pub type SeparationReport64 = SeparationReport<f64>;
pub type SeparationReport32 = SeparationReport<f32>;
