use std::path::Path;

use ica_emk::metrics::{gain_matrix, isr, pair_sources};
use ica_emk::run_ica;
use ndarray::{Array2, Axis};
use serde::Serialize;

use super::record_timings;
use crate::args::SeparateArgs;
use crate::error::{CliError, CliResult};
use crate::io::{create_dir, fmt_float, read_matrix, write_json, write_matrix, write_table};
use crate::manifest::RunManifest;

#[derive(Debug, Serialize)]
pub struct SeparationSummary {
    pub isr_db: f64,
    pub gain: Vec<Vec<f64>>,
    pub permutation: Vec<usize>,
    pub correlations: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Ground truth sitting next to the mixtures, when both files exist.
fn ground_truth(mixtures: &Path) -> CliResult<Option<(Array2<f64>, Array2<f64>)>> {
    let dir = mixtures.parent().unwrap_or(Path::new("."));
    let (a, s) = (dir.join("mixing.csv"), dir.join("sources.csv"));
    if !(a.is_file() && s.is_file()) {
        return Ok(None);
    }
    Ok(Some((read_matrix(&a)?, read_matrix(&s)?)))
}

pub fn separate(args: &SeparateArgs) -> CliResult<()> {
    let config = args.ica.config();
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let x = read_matrix(&args.mixtures)?;
    create_dir(&args.out)?;
    let mut manifest = RunManifest::new("separate", args.ica.seed, args);
    manifest.inputs.push(args.mixtures.clone());

    let (state, whitening) = run_ica(x.view(), &config)?;
    record_timings(&mut manifest, &state.timings);
    let estimates = state.w.dot(&whitening.apply(x.view()));

    write_matrix(&args.out.join("demixing.csv"), &state.w)?;
    write_matrix(&args.out.join("whitening.csv"), &whitening.forward)?;
    write_matrix(
        &args.out.join("mean.csv"),
        &whitening.mean.clone().insert_axis(Axis(1)),
    )?;
    write_matrix(&args.out.join("estimates.csv"), &estimates)?;
    let trace = state
        .cost_trace
        .iter()
        .enumerate()
        .map(|(i, &c)| vec![(i + 1).to_string(), fmt_float(c)]);
    write_table(
        &args.out.join("cost_trace.csv"),
        &["iteration", "cost"],
        trace,
    )?;
    for f in [
        "demixing.csv",
        "whitening.csv",
        "mean.csv",
        "estimates.csv",
        "cost_trace.csv",
    ] {
        manifest.output(f);
    }

    if let Some((mixing, sources)) = ground_truth(&args.mixtures)? {
        if mixing.dim() != (x.nrows(), x.nrows()) || sources.dim() != x.dim() {
            return Err(CliError::Io(format!(
                "ground truth shapes {:?} and {:?} do not match mixtures {:?}",
                mixing.dim(),
                sources.dim(),
                x.dim()
            )));
        }
        let gain = gain_matrix(state.w.view(), &whitening, mixing.view())?;
        let (permutation, correlations) = pair_sources(sources.view(), estimates.view())?;
        let summary = SeparationSummary {
            isr_db: isr(gain.view())?,
            gain: gain.rows().into_iter().map(|r| r.to_vec()).collect(),
            permutation,
            correlations,
            iterations: state.iterations_run,
            converged: state.converged,
        };
        write_json(&args.out.join("report.json"), &summary)?;
        manifest.output("report.json");
    }
    manifest.write(&args.out)
}
