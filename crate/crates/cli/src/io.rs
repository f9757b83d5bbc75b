//! File formats: headerless CSV matrices, headed CSV tables, JSON and binary
//! PGM images. Floats are written with 17 significant digits, and a
//! write/read round trip is exact.

use std::fs;
use std::path::Path;

use image::{GrayImage, ImageFormat, ImageReader};
use ndarray::Array2;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_float(field: &str, path: &Path, line: usize) -> CliResult<f64> {
    field.trim().parse::<f64>().map_err(|_| {
        CliError::Io(format!(
            "{}:{line}: cannot parse {field:?} as a number",
            path.display()
        ))
    })
}

fn reader(path: &Path) -> CliResult<csv::Reader<fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::io(path.display(), e))
}

/// Reads a rectangular matrix with one CSV line per row.
pub fn read_matrix(path: &Path) -> CliResult<Array2<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader(path)?.records().enumerate() {
        let record = record.map_err(|e| CliError::io(path.display(), e))?;
        let row = record
            .iter()
            .map(|f| parse_float(f, path, i + 1))
            .collect::<CliResult<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(CliError::Io(format!(
                    "{}:{}: expected {} columns, found {}",
                    path.display(),
                    i + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(CliError::Io(format!("{}: no data", path.display())));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(Array2::from_shape_vec((rows.len(), cols), flat).expect("rectangular rows"))
}

/// Reads a single column of values; a non-numeric first line is taken as a
/// header.
pub fn read_column(path: &Path) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for (i, record) in reader(path)?.records().enumerate() {
        let record = record.map_err(|e| CliError::io(path.display(), e))?;
        if record.len() != 1 {
            return Err(CliError::Io(format!(
                "{}:{}: expected one column, found {}",
                path.display(),
                i + 1,
                record.len()
            )));
        }
        match parse_float(&record[0], path, i + 1) {
            Ok(v) => out.push(v),
            Err(_) if i == 0 => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

pub fn write_matrix(path: &Path, m: &Array2<f64>) -> CliResult<()> {
    let rows = m
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|&v| fmt_float(v)).collect());
    write_records(path, None, rows)
}

/// Writes a table with a header line.
pub fn write_table(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> CliResult<()> {
    write_records(path, Some(header), rows)
}

fn write_records(
    path: &Path,
    header: Option<&[&str]>,
    rows: impl IntoIterator<Item = Vec<String>>,
) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path.display(), e))?;
    if let Some(h) = header {
        w.write_record(h)
            .map_err(|e| CliError::io(path.display(), e))?;
    }
    for row in rows {
        w.write_record(&row)
            .map_err(|e| CliError::io(path.display(), e))?;
    }
    w.flush().map_err(|e| CliError::io(path.display(), e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(path.display(), e))?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path.display(), e))
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path.display(), e))
}

/// Reads an 8-bit grayscale PGM.
pub fn read_pgm(path: &Path) -> CliResult<GrayImage> {
    let mut reader = ImageReader::open(path).map_err(|e| CliError::io(path.display(), e))?;
    reader.set_format(ImageFormat::Pnm);
    let img = reader
        .decode()
        .map_err(|e| CliError::io(path.display(), e))?;
    match img {
        image::DynamicImage::ImageLuma8(g) => Ok(g),
        other => Err(CliError::Io(format!(
            "{}: expected 8-bit grayscale, found {:?}",
            path.display(),
            other.color()
        ))),
    }
}

/// Writes a binary (P5) PGM.
pub fn write_pgm(path: &Path, img: &GrayImage) -> CliResult<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path.display(), e))?;
    let encoder = image::codecs::pnm::PnmEncoder::new(std::io::BufWriter::new(file)).with_subtype(
        image::codecs::pnm::PnmSubtype::Graymap(image::codecs::pnm::SampleEncoding::Binary),
    );
    img.write_with_encoder(encoder)
        .map_err(|e| CliError::io(path.display(), e))
}
