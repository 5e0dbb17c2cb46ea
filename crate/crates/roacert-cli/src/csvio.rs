//! Dataset CSV format: header `x1,...,xn,f1,...,fn`, decimal floats, UTF-8,
//! `#`-prefixed comment lines.

use std::path::Path;

use roacert_core::dataset::{Dataset, Sample};

use crate::CliError;

/// Loads a dataset from CSV and pairs it with the given Lipschitz bound and
/// noise level.
pub fn load_dataset_csv(path: &Path, m: f64, noise_eta: f64) -> Result<Dataset, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let n_cols = headers.len();
    if n_cols == 0 || n_cols % 2 != 0 {
        return Err(CliError::ParseError {
            line: 1,
            message: format!("expected an even number of columns x1..xn,f1..fn, got {n_cols}"),
        });
    }
    let dim = n_cols / 2;
    for (i, h) in headers.iter().enumerate() {
        let expect = if i < dim { format!("x{}", i + 1) } else { format!("f{}", i + 1 - dim) };
        if h != expect {
            return Err(CliError::ParseError {
                line: 1,
                message: format!("column {} is '{h}', expected '{expect}'", i + 1),
            });
        }
    }
    let mut samples = Vec::new();
    for (row_idx, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let line = row_idx + 2;
        if record.len() != n_cols {
            return Err(CliError::ParseError {
                line,
                message: format!("{} fields, expected {n_cols}", record.len()),
            });
        }
        let mut vals = Vec::with_capacity(n_cols);
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| CliError::ParseError {
                line,
                message: format!("'{field}' is not a decimal float"),
            })?;
            vals.push(v);
        }
        samples.push(Sample { x: vals[..dim].to_vec(), f: vals[dim..].to_vec() });
    }
    Dataset::new(samples, m, noise_eta).map_err(|e| CliError::Core(e.to_string()))
}

/// Writes a dataset in the same CSV layout (positions then velocities).
pub fn write_dataset_csv(path: &Path, ds: &Dataset) -> Result<(), CliError> {
    let dim = ds.samples.first().map_or(0, |s| s.x.len());
    let mut wtr = csv::Writer::from_path(path)?;
    let header: Vec<String> = (1..=dim)
        .map(|i| format!("x{i}"))
        .chain((1..=dim).map(|i| format!("f{i}")))
        .collect();
    wtr.write_record(&header).map_err(csv_err)?;
    for s in &ds.samples {
        let row: Vec<String> =
            s.x.iter().chain(s.f.iter()).map(|v| format!("{v:.17e}")).collect();
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    let line = e.position().map_or(0, |p| p.line() as usize);
    CliError::ParseError { line, message: e.to_string() }
}
