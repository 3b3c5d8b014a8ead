//! Table writers. Every file starts with a header naming the version and
//! seed: a `#` comment line for CSV, a `"header"` member for JSON.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::Format;
use crate::error::{CliError, CliResult};

pub fn header(seed: u64) -> String {
    format!("gaptime {} seed={seed}", env!("CARGO_PKG_VERSION"))
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub struct Writer {
    dir: PathBuf,
    seed: u64,
    pub written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path, seed: u64) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Writer { dir: dir.to_path_buf(), seed, written: Vec::new() })
    }

    fn put(&mut self, name: &str, bytes: Vec<u8>) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, stem: &str, table: &Table) -> CliResult<()> {
        let mut buf = format!("# {}\n", header(self.seed)).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let err = |e: csv::Error| CliError::Parse(format!("writing {stem}: {e}"));
            w.write_record(&table.columns).map_err(err)?;
            for row in &table.rows {
                w.write_record(row).map_err(err)?;
            }
            w.flush().map_err(|e| CliError::io(self.dir.join(stem), e))?;
        }
        self.put(&format!("{stem}.csv"), buf)
    }

    pub fn json<T: Serialize>(&mut self, stem: &str, body: &T) -> CliResult<()> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            header: String,
            #[serde(flatten)]
            body: &'a T,
        }
        let doc = Doc { header: header(self.seed), body };
        let mut text = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::Parse(format!("writing {stem}: {e}")))?;
        text.push('\n');
        self.put(&format!("{stem}.json"), text.into_bytes())
    }

    /// Writes either the CSV tables or one JSON document.
    pub fn emit<T: Serialize>(&mut self, format: Format, stem: &str, tables: &[(&str, &Table)], body: &T) -> CliResult<()> {
        match format {
            Format::Csv => tables.iter().try_for_each(|(name, t)| self.csv(name, t)),
            Format::Json => self.json(stem, body),
        }
    }
}
