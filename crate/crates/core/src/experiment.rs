//! End-to-end trials on synthetic mixtures: generate, mix, separate, score.

use std::time::Instant;

use ndarray::Array2;

use crate::error::Result;
use crate::metrics::{gain_matrix, isr, pair_sources, SeparationReport};
use crate::optimizer::{run_ica, DemixingState, IcaConfig};
use crate::preprocess::WhiteningTransform;
use crate::rng::{child_seed, tag};
use crate::sources_bench::{
    gen_gamma_sources, gen_ggd_mixture_sources, random_mixing, standardize_rows,
};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    GgdMixture,
    Gamma,
}

impl SourceKind {
    pub fn name(self) -> &'static str {
        match self {
            SourceKind::GgdMixture => "ggd-mix",
            SourceKind::Gamma => "gamma",
        }
    }
}

/// Sources, mixing matrix and mixtures `X = A S`.
#[derive(Debug, Clone)]
pub struct Trial<T> {
    pub sources: Array2<T>,
    pub mixing: Array2<T>,
    pub mixtures: Array2<T>,
}

pub fn make_trial<T: Scalar>(kind: SourceKind, n: usize, t: usize, seed: u64) -> Result<Trial<T>> {
    let sources = match kind {
        SourceKind::GgdMixture => gen_ggd_mixture_sources(n, t, seed)?.0,
        SourceKind::Gamma => gen_gamma_sources(n, t, seed)?,
    };
    let mixing = random_mixing(n, seed)?;
    let mixtures = mixing.dot(&sources);
    Ok(Trial {
        sources,
        mixing,
        mixtures,
    })
}

#[derive(Debug, Clone)]
pub struct TrialOutcome<T> {
    pub state: DemixingState<T>,
    pub whitening: WhiteningTransform<T>,
    pub estimates: Array2<T>,
    pub report: SeparationReport<T>,
}

/// Separates `mixing · sources` and scores against the ground truth.
pub fn separate_known<T: Scalar>(
    sources: &Array2<T>,
    mixing: &Array2<T>,
    config: &IcaConfig<T>,
) -> Result<TrialOutcome<T>> {
    let mixtures = mixing.dot(sources);
    let (state, whitening) = run_ica(mixtures.view(), config)?;
    let estimates = state.w.dot(&whitening.apply(mixtures.view()));
    let gain = gain_matrix(state.w.view(), &whitening, mixing.view())?;
    let isr_db = isr(gain.view())?;
    let (permutation, correlations) = pair_sources(sources.view(), estimates.view())?;
    let report = SeparationReport {
        gain,
        isr_db,
        permutation,
        correlations,
        timing: state.timings,
        speedup: None,
    };
    Ok(TrialOutcome {
        state,
        whitening,
        estimates,
        report,
    })
}

/// Standardizes image rows, mixes them (random `A`, or the identity when
/// `identity_mixing` is set) and separates the result.
pub fn separate_images<T: Scalar>(
    images: &Array2<T>,
    identity_mixing: bool,
    config: &IcaConfig<T>,
) -> Result<(Trial<T>, TrialOutcome<T>)> {
    let mut sources = images.clone();
    standardize_rows(&mut sources);
    let n = sources.nrows();
    let mixing = if identity_mixing {
        Array2::eye(n)
    } else {
        random_mixing(n, config.seed)?
    };
    let outcome = separate_known(&sources, &mixing, config)?;
    let mixtures = mixing.dot(&sources);
    Ok((
        Trial {
            sources,
            mixing,
            mixtures,
        },
        outcome,
    ))
}

/// Seed of run `index` in a sweep rooted at `base`.
pub fn run_seed(base: u64, index: usize) -> u64 {
    child_seed(base, tag::TRIAL, index as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub samples: usize,
    pub isr_db: Vec<f64>,
}

impl SweepPoint {
    pub fn runs(&self) -> usize {
        self.isr_db.len()
    }

    pub fn median(&self) -> f64 {
        median(&self.isr_db)
    }

    pub fn mean(&self) -> f64 {
        self.isr_db.iter().sum::<f64>() / self.isr_db.len() as f64
    }
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// ISR of `runs` independent trials at each sample size.
pub fn isr_sweep<T: Scalar>(
    kind: SourceKind,
    n: usize,
    sample_sizes: &[usize],
    runs: usize,
    config: &IcaConfig<T>,
    base_seed: u64,
) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::with_capacity(sample_sizes.len());
    for &t in sample_sizes {
        let mut values = Vec::with_capacity(runs);
        for r in 0..runs {
            let seed = run_seed(base_seed, r);
            let trial = make_trial::<T>(kind, n, t, seed)?;
            let cfg = IcaConfig {
                seed,
                ..config.clone()
            };
            let outcome = separate_known(&trial.sources, &trial.mixing, &cfg)?;
            values.push(outcome.report.isr_db.to_f64_lossy());
        }
        out.push(SweepPoint {
            samples: t,
            isr_db: values,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupPoint {
    pub sources: usize,
    pub t_sequential: f64,
    pub t_parallel: f64,
}

impl SpeedupPoint {
    pub fn speedup(&self) -> f64 {
        self.t_sequential / self.t_parallel
    }
}

/// Wall time of a fixed number of snapshot-sweep iterations on one lane
/// versus `workers` lanes, averaged over `runs` trials.
pub fn speedup_point<T: Scalar>(
    kind: SourceKind,
    n: usize,
    t: usize,
    iterations: usize,
    workers: usize,
    runs: usize,
    base_seed: u64,
) -> Result<SpeedupPoint> {
    let mut seq = 0.0;
    let mut par = 0.0;
    for r in 0..runs {
        let seed = run_seed(base_seed, r);
        let trial = make_trial::<T>(kind, n, t, seed)?;
        let base = IcaConfig::<T> {
            seed,
            max_iters: iterations,
            lag_k: 1,
            fixed_iterations: true,
            force_jacobi: true,
            ..IcaConfig::default()
        };
        let clock = Instant::now();
        run_ica(
            trial.mixtures.view(),
            &IcaConfig {
                workers: 1,
                ..base.clone()
            },
        )?;
        seq += clock.elapsed().as_secs_f64();
        let clock = Instant::now();
        run_ica(trial.mixtures.view(), &IcaConfig { workers, ..base })?;
        par += clock.elapsed().as_secs_f64();
    }
    let runs = runs.max(1) as f64;
    Ok(SpeedupPoint {
        sources: n,
        t_sequential: seq / runs,
        t_parallel: par / runs,
    })
}
