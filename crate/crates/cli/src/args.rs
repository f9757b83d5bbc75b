use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ica_emk::{IcaConfig64, InitStrategy};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "icaemk",
    version,
    about = "Blind source separation by entropy maximization with kernels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic sources, a mixing matrix and their mixtures.
    Gen(GenArgs),
    /// Separate the mixtures in a CSV file.
    Separate(SeparateArgs),
    /// Fit a maximum-entropy density to a single-column sample.
    Density(DensityArgs),
    /// ISR against sample size, and optionally parallel speedup.
    Bench(BenchArgs),
    /// Mix and separate grayscale PGM images.
    DemixImages(DemixImagesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    GgdMix,
    Gamma,
    Textures,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    Random,
    FixedNonlinearity,
    Identity,
}

impl From<Init> for InitStrategy {
    fn from(i: Init) -> Self {
        match i {
            Init::Random => InitStrategy::RandomOrthogonal,
            Init::FixedNonlinearity => InitStrategy::FixedNonlinearity,
            Init::Identity => InitStrategy::Identity,
        }
    }
}

/// Optimizer flags shared by every command that runs the separation.
#[derive(Debug, Clone, Args, Serialize)]
pub struct IcaArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 2 or more switches to the snapshot sweep.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 0.01)]
    pub gamma: f64,
    #[arg(long = "lag-k", default_value_t = 8)]
    pub lag_k: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
    #[arg(long = "max-iters", default_value_t = 200)]
    pub max_iters: usize,
    #[arg(long = "max-kernels", default_value_t = 5)]
    pub max_kernels: usize,
    #[arg(long = "refit-period", default_value_t = 1)]
    pub refit_period: usize,
    #[arg(long, value_enum, default_value_t = Init::FixedNonlinearity)]
    pub init: Init,
    /// Use the snapshot sweep even with a single worker.
    #[arg(long)]
    pub jacobi: bool,
}

impl IcaArgs {
    pub fn config(&self) -> IcaConfig64 {
        IcaConfig64 {
            gamma: self.gamma,
            lag_k: self.lag_k,
            delta: self.delta,
            max_iters: self.max_iters,
            max_local_kernels: self.max_kernels,
            refit_period: self.refit_period,
            workers: self.workers,
            seed: self.seed,
            init: self.init.into(),
            force_jacobi: self.jacobi,
            fixed_iterations: false,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    /// Number of sources.
    #[arg(short = 'n', long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub sources: u64,
    /// Samples per source.
    #[arg(short = 't', long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Image side length for `textures`.
    #[arg(long, default_value_t = 64)]
    pub side: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeparateArgs {
    /// Mixtures, one channel per line.
    pub mixtures: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub ica: IcaArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    pub sample: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long = "max-kernels", default_value_t = 5)]
    pub max_kernels: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    #[arg(short = 'n', long, default_value_t = 4)]
    pub sources: usize,
    /// Sample sizes of the ISR sweep.
    #[arg(short = 't', long, value_delimiter = ',', default_value = "1000,10000")]
    pub samples: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub runs: usize,
    /// Also time sequential against parallel sweeps.
    #[arg(long = "parallel-sweep")]
    pub parallel_sweep: bool,
    /// Source counts of the speedup sweep.
    #[arg(
        long = "sweep-sources",
        value_delimiter = ',',
        default_value = "2,4,8,16"
    )]
    pub sweep_sources: Vec<usize>,
    /// Samples per source in the speedup sweep.
    #[arg(long = "sweep-samples", default_value_t = 1000)]
    pub sweep_samples: usize,
    /// Fixed iteration count of the speedup sweep.
    #[arg(long = "sweep-iters", default_value_t = 100)]
    pub sweep_iters: usize,
    #[arg(short, long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub ica: IcaArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DemixImagesArgs {
    /// Two or more grayscale PGM images of equal size.
    #[arg(required = true, num_args = 2..)]
    pub images: Vec<PathBuf>,
    /// Skip the random mixing.
    #[arg(long = "identity-mixing")]
    pub identity_mixing: bool,
    #[arg(short, long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub ica: IcaArgs,
}
