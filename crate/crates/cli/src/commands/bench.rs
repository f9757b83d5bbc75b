use ica_emk::experiment::{isr_sweep, speedup_point, SourceKind};

use crate::args::{BenchArgs, Kind};
use crate::error::{CliError, CliResult};
use crate::io::{create_dir, fmt_float, write_table};
use crate::manifest::RunManifest;

/// Lanes used by the speedup sweep when `--workers` is left at zero.
const DEFAULT_SWEEP_WORKERS: usize = 4;

pub fn bench(args: &BenchArgs) -> CliResult<()> {
    let kind = match args.kind {
        Kind::GgdMix => SourceKind::GgdMixture,
        Kind::Gamma => SourceKind::Gamma,
        Kind::Textures => return Err(CliError::Usage("bench supports ggd-mix and gamma".into())),
    };
    if args.runs == 0 || args.samples.is_empty() {
        return Err(CliError::Usage(
            "need at least one run and one sample size".into(),
        ));
    }
    let config = args.ica.config();
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    create_dir(&args.out)?;
    let mut manifest = RunManifest::new("bench", args.ica.seed, args);

    let clock = std::time::Instant::now();
    let sweep = isr_sweep::<f64>(
        kind,
        args.sources,
        &args.samples,
        args.runs,
        &config,
        args.ica.seed,
    )?;
    manifest.timing("isr_sweep", clock.elapsed().as_secs_f64());
    let rows = sweep.iter().map(|p| {
        vec![
            p.samples.to_string(),
            fmt_float(p.median()),
            fmt_float(p.mean()),
            p.runs().to_string(),
        ]
    });
    write_table(
        &args.out.join("isr_vs_T.csv"),
        &["samples", "median_isr_db", "mean_isr_db", "runs"],
        rows,
    )?;
    manifest.output("isr_vs_T.csv");

    if args.parallel_sweep {
        let workers = if args.ica.workers >= 2 {
            args.ica.workers
        } else {
            DEFAULT_SWEEP_WORKERS
        };
        let clock = std::time::Instant::now();
        let mut rows = Vec::new();
        for &n in &args.sweep_sources {
            if kind == SourceKind::Gamma && n > 8 {
                return Err(CliError::Usage(format!(
                    "gamma sources have shapes 1..=8, asked for {n}"
                )));
            }
            let p = speedup_point::<f64>(
                kind,
                n,
                args.sweep_samples,
                args.sweep_iters,
                workers,
                args.runs,
                args.ica.seed,
            )?;
            log::info!(
                "N={n}: sequential {:.3}s, parallel {:.3}s",
                p.t_sequential,
                p.t_parallel
            );
            rows.push(vec![
                n.to_string(),
                fmt_float(p.t_sequential),
                fmt_float(p.t_parallel),
                fmt_float(p.speedup()),
            ]);
        }
        manifest.timing("speedup_sweep", clock.elapsed().as_secs_f64());
        write_table(
            &args.out.join("speedup.csv"),
            &["sources", "t_sequential", "t_parallel", "speedup"],
            rows,
        )?;
        manifest.output("speedup.csv");
    }
    manifest.write(&args.out)
}
