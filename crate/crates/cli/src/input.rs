//! Long-format CSV ingestion.
//!
//! Lines starting with `#` are skipped, so files written by `simulate
//! --sample-only` read back directly.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use gaptime::prelude::*;

use crate::args::DataArgs;
use crate::error::{CliError, CliResult};

const MAX_REPORTED: usize = 20;

pub struct Dataset {
    pub rows: Vec<RawRow>,
    pub censor: HashMap<String, f64>,
    /// Group label per subject when a group column was requested.
    pub groups: BTreeMap<String, String>,
    pub num_causes: u8,
}

struct Table {
    headers: Vec<String>,
    /// `(line, fields)` pairs.
    records: Vec<(u64, Vec<String>)>,
}

fn read_table(path: &Path) -> CliResult<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        records.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(Table { headers, records })
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.kind() {
        csv::ErrorKind::Io(_) => {
            let csv::ErrorKind::Io(io) = e.into_kind() else { unreachable!() };
            CliError::io(path, io)
        }
        _ => CliError::Parse(format!("{}: {e}", path.display())),
    }
}

impl Table {
    fn column(&self, path: &Path, name: &str) -> CliResult<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Parse(format!("{}: missing column '{name}'", path.display())))
    }

    fn has_column(&self, name: &str) -> bool {
        self.headers.iter().any(|h| h == name)
    }
}

/// Collects row-level diagnostics and reports up to [`MAX_REPORTED`].
#[derive(Default)]
struct Problems(Vec<String>);

impl Problems {
    fn push(&mut self, path: &Path, line: u64, msg: String) {
        self.0.push(format!("{}:{line}: {msg}", path.display()));
    }

    fn finish(self) -> CliResult<()> {
        if self.0.is_empty() {
            return Ok(());
        }
        let total = self.0.len();
        let mut text: Vec<String> = self.0.into_iter().take(MAX_REPORTED).collect();
        if total > MAX_REPORTED {
            text.push(format!("... and {} more", total - MAX_REPORTED));
        }
        Err(CliError::Parse(text.join("\n")))
    }
}

fn field<'a>(fields: &'a [String], i: usize) -> &'a str {
    fields.get(i).map_or("", String::as_str)
}

fn parse_field<T: std::str::FromStr>(fields: &[String], i: usize, name: &str) -> Result<T, String> {
    let raw = field(fields, i);
    raw.parse().map_err(|_| format!("cannot parse {name} '{raw}'"))
}

pub fn load(args: &DataArgs, group_col: Option<&str>) -> CliResult<Dataset> {
    let path = args.input.as_path();
    let table = read_table(path)?;
    if table.records.is_empty() {
        return Err(CliError::Parse(format!("{}: no subjects parsed", path.display())));
    }
    let subject = table.column(path, &args.subject_col)?;
    let stage = table.column(path, &args.stage_col)?;
    let gap = table.column(path, &args.gap_col)?;
    let cause = table.column(path, &args.cause_col)?;
    let censor_inline = args.censor_file.is_none();
    let censor_col = if censor_inline {
        if !table.has_column(&args.censor_col) {
            return Err(CliError::Usage(format!(
                "no censoring times: input lacks column '{}' and no --censor-file was given",
                args.censor_col
            )));
        }
        Some(table.column(path, &args.censor_col)?)
    } else {
        None
    };
    let group = group_col.map(|g| table.column(path, g)).transpose()?;

    let mut problems = Problems::default();
    let mut rows = Vec::with_capacity(table.records.len());
    let mut censor: HashMap<String, f64> = HashMap::new();
    let mut groups: BTreeMap<String, String> = BTreeMap::new();
    for (line, fields) in &table.records {
        let id = field(fields, subject).to_string();
        if id.is_empty() {
            problems.push(path, *line, "empty subject id".into());
            continue;
        }
        let parsed = (|| -> Result<RawRow, String> {
            Ok(RawRow {
                subject_id: id.clone(),
                stage: parse_field(fields, stage, "stage")?,
                gap_time: parse_field(fields, gap, "gap time")?,
                cause: parse_field(fields, cause, "cause")?,
            })
        })();
        match parsed {
            Ok(r) => rows.push(r),
            Err(m) => problems.push(path, *line, m),
        }
        if let Some(c) = censor_col {
            match parse_field::<f64>(fields, c, "censoring time") {
                Ok(v) => {
                    if let Some(prev) = censor.insert(id.clone(), v) {
                        if prev != v {
                            problems.push(path, *line, format!("subject {id}: censoring time {v} disagrees with {prev}"));
                        }
                    }
                }
                Err(m) => problems.push(path, *line, m),
            }
        }
        if let Some(g) = group {
            let label = field(fields, g).to_string();
            if let Some(prev) = groups.insert(id.clone(), label.clone()) {
                if prev != label {
                    problems.push(path, *line, format!("subject {id}: group '{label}' disagrees with '{prev}'"));
                }
            }
        }
    }
    if let Some(file) = &args.censor_file {
        let ctable = read_table(file)?;
        let s = ctable.column(file, &args.subject_col)?;
        let c = ctable.column(file, &args.censor_col)?;
        for (line, fields) in &ctable.records {
            match parse_field::<f64>(fields, c, "censoring time") {
                Ok(v) => {
                    if censor.insert(field(fields, s).to_string(), v).is_some() {
                        problems.push(file, *line, format!("duplicate subject {}", field(fields, s)));
                    }
                }
                Err(m) => problems.push(file, *line, m),
            }
        }
    }
    problems.finish()?;

    let num_causes = match args.num_causes {
        Some(k) => k,
        None => rows.iter().map(|r| r.cause).max().unwrap_or(0).max(1),
    };
    Ok(Dataset { rows, censor, groups, num_causes })
}

impl Dataset {
    pub fn sample(&self) -> CliResult<Sample> {
        Ok(build_sample(&self.rows, &self.censor, self.num_causes)?)
    }

    /// Splits into the two groups named in the group column, in label order.
    pub fn split_groups(&self) -> CliResult<[(String, Sample); 2]> {
        let labels: BTreeSet<&String> = self.groups.values().collect();
        if labels.len() != 2 {
            return Err(CliError::Usage(format!(
                "the group column must hold exactly two labels, found {}",
                labels.len()
            )));
        }
        let labels: Vec<String> = labels.into_iter().cloned().collect();
        let part = |label: &String| -> CliResult<(String, Sample)> {
            let ids: BTreeSet<&String> = self.groups.iter().filter(|(_, g)| *g == label).map(|(s, _)| s).collect();
            let rows: Vec<RawRow> = self.rows.iter().filter(|r| ids.contains(&r.subject_id)).cloned().collect();
            let censor: HashMap<String, f64> = self
                .censor
                .iter()
                .filter(|(s, _)| ids.contains(s))
                .map(|(s, c)| (s.clone(), *c))
                .collect();
            Ok((label.clone(), build_sample(&rows, &censor, self.num_causes)?))
        };
        Ok([part(&labels[0])?, part(&labels[1])?])
    }
}
