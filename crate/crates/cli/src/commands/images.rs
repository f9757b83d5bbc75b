use ica_emk::experiment::separate_images;
use image::GrayImage;
use ndarray::{Array2, ArrayView1};
use serde::Serialize;

use super::record_timings;
use crate::args::DemixImagesArgs;
use crate::error::{CliError, CliResult};
use crate::io::{create_dir, read_pgm, write_json, write_pgm};
use crate::manifest::RunManifest;

#[derive(Debug, Serialize)]
struct ImageReport {
    images: Vec<String>,
    width: u32,
    height: u32,
    isr_db: f64,
    /// `permutation[i]` is the estimate paired with image `i`.
    permutation: Vec<usize>,
    correlations: Vec<f64>,
}

/// Linear rescale of a row to the full 0–255 range.
fn to_image(row: ArrayView1<'_, f64>, width: u32, height: u32) -> GrayImage {
    let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let pixels = row
        .iter()
        .map(|&v| ((v - lo) / span * 255.0).round() as u8)
        .collect();
    GrayImage::from_raw(width, height, pixels).expect("width x height pixels")
}

pub fn demix_images(args: &DemixImagesArgs) -> CliResult<()> {
    let config = args.ica.config();
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let images = args
        .images
        .iter()
        .map(|p| read_pgm(p))
        .collect::<CliResult<Vec<_>>>()?;
    let (width, height) = images[0].dimensions();
    if let Some((p, img)) = args
        .images
        .iter()
        .zip(&images)
        .find(|(_, i)| i.dimensions() != (width, height))
    {
        return Err(CliError::Io(format!(
            "{} is {:?}, expected {:?}",
            p.display(),
            img.dimensions(),
            (width, height)
        )));
    }
    create_dir(&args.out)?;
    let mut manifest = RunManifest::new("demix-images", args.ica.seed, args);
    manifest.inputs.extend(args.images.iter().cloned());

    let pixels = (width * height) as usize;
    let data = Array2::from_shape_fn((images.len(), pixels), |(i, k)| {
        f64::from(images[i].as_raw()[k])
    });
    let (trial, out) = separate_images(&data, args.identity_mixing, &config)?;
    record_timings(&mut manifest, &out.state.timings);

    for (i, row) in trial.mixtures.rows().into_iter().enumerate() {
        let file = format!("mixed_{}.pgm", i + 1);
        write_pgm(&args.out.join(&file), &to_image(row, width, height))?;
        manifest.output(file);
    }
    for (i, &est) in out.report.permutation.iter().enumerate() {
        let mut row = out.estimates.row(est).to_owned();
        let overlap: f64 = row
            .iter()
            .zip(trial.sources.row(i))
            .map(|(a, b)| a * b)
            .sum();
        if overlap < 0.0 {
            row.mapv_inplace(|v| -v);
        }
        let file = format!("recovered_{}.pgm", i + 1);
        write_pgm(&args.out.join(&file), &to_image(row.view(), width, height))?;
        manifest.output(file);
    }

    let report = ImageReport {
        images: args
            .images
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
        width,
        height,
        isr_db: out.report.isr_db,
        permutation: out.report.permutation.clone(),
        correlations: out.report.correlations.clone(),
    };
    write_json(&args.out.join("report.json"), &report)?;
    manifest.output("report.json");
    manifest.write(&args.out)
}
