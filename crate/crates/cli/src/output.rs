use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use crate::error::CliError;

/// A CSV table with `#`-prefixed metadata lines ahead of the header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    /// Rejects rows that are ragged or contain a non-finite value.
    pub fn check(&self) -> Result<(), CliError> {
        for row in &self.rows {
            if row.len() != self.header.len() {
                return Err(CliError::Numerical(format!(
                    "row has {} fields, header {}",
                    row.len(),
                    self.header.len()
                )));
            }
            if let Some((name, v)) = self.header.iter().zip(row).find(|(_, v)| !v.is_finite()) {
                return Err(CliError::Numerical(format!(
                    "non-finite {name} = {v} in row starting {}",
                    row[0]
                )));
            }
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, w: W) -> Result<(), CliError> {
        self.check()?;
        self.write_unchecked(w).map_err(CliError::from)
    }

    fn write_unchecked<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(&self.header)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(|v| format_number(*v)))?;
        }
        csv.flush()
    }

    /// Writes to `path`, or to stdout when absent. A reader closing stdout
    /// early (`| head`) is not an error.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), CliError> {
        match path {
            Some(p) => self.write(io::BufWriter::new(File::create(p)?)),
            None => {
                self.check()?;
                match self.write_unchecked(io::stdout().lock()) {
                    Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                    r => r.map_err(CliError::from),
                }
            }
        }
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        // keeps the sign of −0.0 out of the output
        "0".to_string()
    } else {
        format!("{v:.16e}")
    }
}
