use ica_emk::emk_density::{select_kernels_with, SelectionOptions, GLOBALS, MAX_LOCAL_KERNELS};
use serde::Serialize;

use crate::args::DensityArgs;
use crate::error::{CliError, CliResult};
use crate::io::{create_dir, fmt_float, read_column, write_json, write_table};
use crate::manifest::RunManifest;

#[derive(Debug, Serialize)]
struct DensityReport {
    samples: usize,
    entropy: f64,
    kernels: usize,
    mdl_trace: Vec<f64>,
    small_sample: bool,
    constraint_residual: f64,
}

pub fn density(args: &DensityArgs) -> CliResult<()> {
    if args.max_kernels > MAX_LOCAL_KERNELS {
        return Err(CliError::Usage(format!(
            "--max-kernels is at most {MAX_LOCAL_KERNELS}"
        )));
    }
    let y = read_column(&args.sample)?;
    if y.len() < 2 {
        return Err(CliError::Io(format!(
            "{}: need at least two values, found {}",
            args.sample.display(),
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Io(format!(
            "{}: non-finite value",
            args.sample.display()
        )));
    }
    create_dir(&args.out)?;
    let mut manifest = RunManifest::new("density", 0, args);
    manifest.inputs.push(args.sample.clone());

    let clock = std::time::Instant::now();
    let sel = select_kernels_with(
        &y,
        &SelectionOptions::default().with_max_kernels(args.max_kernels),
    )?;
    manifest.timing("fit", clock.elapsed().as_secs_f64());
    let model = &sel.model;
    let locals = model.spec.locals();

    let names = GLOBALS
        .iter()
        .map(|g| g.name().to_string())
        .chain((1..=locals.len()).map(|k| format!("kernel{k}")));
    let lambda = names
        .zip(&model.lambda)
        .map(|(n, &l)| vec![n, fmt_float(l)]);
    write_table(
        &args.out.join("lambda.csv"),
        &["function", "lambda"],
        lambda,
    )?;
    let kernels = locals
        .iter()
        .map(|k| vec![fmt_float(k.mu), fmt_float(k.sigma)]);
    write_table(&args.out.join("kernels.csv"), &["mu", "sigma"], kernels)?;
    let grid = model
        .grid
        .points
        .iter()
        .zip(model.grid_density())
        .map(|(&x, p)| vec![fmt_float(x), fmt_float(p)]);
    write_table(&args.out.join("density_grid.csv"), &["x", "density"], grid)?;

    let report = DensityReport {
        samples: y.len(),
        entropy: model.entropy(),
        kernels: locals.len(),
        mdl_trace: sel.mdl_trace.clone(),
        small_sample: sel.small_sample,
        constraint_residual: model.constraint_residual(),
    };
    write_json(&args.out.join("report.json"), &report)?;
    for f in [
        "lambda.csv",
        "kernels.csv",
        "density_grid.csv",
        "report.json",
    ] {
        manifest.output(f);
    }
    manifest.write(&args.out)
}
