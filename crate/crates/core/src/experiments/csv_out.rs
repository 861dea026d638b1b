use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::knn_rule::CoverHartRow;
use crate::{Error, Result};

use super::{ErrorCurveRow, HubGrowthRow, StoneSweepRow};

/// A row type with a fixed CSV schema.
pub trait CsvRecord {
    const HEADER: &'static [&'static str];

    fn fields(&self) -> Vec<String>;
}

/// Shortest representation that parses back to the same value.
fn float(x: f64) -> String {
    format!("{x:?}")
}

impl CsvRecord for ErrorCurveRow {
    const HEADER: &'static [&'static str] = &["n", "k", "trial", "empirical_error", "bayes_error", "aux_name", "aux_value"];

    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.k.to_string(),
            self.trial.to_string(),
            float(self.empirical_error),
            float(self.bayes_error),
            self.aux_name.clone(),
            float(self.aux_value),
        ]
    }
}

impl CsvRecord for HubGrowthRow {
    const HEADER: &'static [&'static str] = &["n", "mean_hub_count", "stderr"];

    fn fields(&self) -> Vec<String> {
        vec![self.n.to_string(), float(self.mean_hub_count), float(self.stderr)]
    }
}

impl CsvRecord for StoneSweepRow {
    const HEADER: &'static [&'static str] = &["k", "max_count", "mean_count"];

    fn fields(&self) -> Vec<String> {
        vec![self.k.to_string(), self.max_count.to_string(), float(self.mean_count)]
    }
}

impl CsvRecord for CoverHartRow {
    const HEADER: &'static [&'static str] = &["n", "k", "max_radius"];

    fn fields(&self) -> Vec<String> {
        vec![self.n.to_string(), self.k.to_string(), float(self.max_radius)]
    }
}

/// Writes a header line and one line per row, LF-terminated.
pub fn write_csv<R: CsvRecord>(rows: &[R], path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file));
    w.write_record(R::HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.fields()).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}
