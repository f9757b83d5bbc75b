use ica_emk::experiment::{make_trial, SourceKind};
use ica_emk::sources_bench::{texture_images, TEXTURE_NAMES};
use image::GrayImage;

use crate::args::{GenArgs, Kind};
use crate::error::{CliError, CliResult};
use crate::io::{create_dir, write_matrix, write_pgm};
use crate::manifest::RunManifest;

pub fn gen(args: &GenArgs) -> CliResult<()> {
    create_dir(&args.out)?;
    let mut manifest = RunManifest::new("gen", args.seed, args);
    let clock = std::time::Instant::now();
    let kind = match args.kind {
        Kind::GgdMix => SourceKind::GgdMixture,
        Kind::Gamma => SourceKind::Gamma,
        Kind::Textures => {
            let side = args.side;
            let images = texture_images(side, args.seed)?;
            for (row, name) in images.rows().into_iter().zip(TEXTURE_NAMES) {
                let img = GrayImage::from_raw(side as u32, side as u32, row.to_vec())
                    .expect("side x side pixels");
                let file = format!("{name}.pgm");
                write_pgm(&args.out.join(&file), &img)?;
                manifest.output(file);
            }
            manifest.timing("generate", clock.elapsed().as_secs_f64());
            return manifest.write(&args.out);
        }
    };
    let n = args.sources as usize;
    if kind == SourceKind::Gamma && n > 8 {
        return Err(CliError::Usage(format!(
            "gamma sources have shapes 1..=8, asked for {n}"
        )));
    }
    let trial = make_trial::<f64>(kind, n, args.samples as usize, args.seed)?;
    manifest.timing("generate", clock.elapsed().as_secs_f64());
    for (file, m) in [
        ("sources.csv", &trial.sources),
        ("mixing.csv", &trial.mixing),
        ("mixtures.csv", &trial.mixtures),
    ] {
        write_matrix(&args.out.join(file), m)?;
        manifest.output(file);
    }
    manifest.write(&args.out)
}
