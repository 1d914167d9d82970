//! Run records and their on-disk form.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{ExperimentConfig, Format};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;
pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A threshold comparison tied to one acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub criterion: u32,
    pub name: String,
    pub observed: String,
    pub threshold: String,
    pub pass: bool,
}

impl Check {
    pub fn new(criterion: u32, name: &str, observed: impl ToString, threshold: impl ToString, pass: bool) -> Self {
        Check {
            criterion,
            name: name.to_string(),
            observed: observed.to_string(),
            threshold: threshold.to_string(),
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub version: String,
    pub schema: u32,
    pub config: ExperimentConfig,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub columns: Vec<String>,
    /// Absent in the JSON summary written next to a CSV file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<f64>>>,
    pub summary: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
}

impl RunRecord {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        self.rows.as_deref().unwrap_or(&[])
    }

    /// Per-trial rows as CSV with a header line.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in self.rows() {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn parse_csv(bytes: &[u8]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
        let mut r = csv::Reader::from_reader(bytes);
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in r.records() {
            let row = record?
                .iter()
                .map(|s| s.parse::<f64>().map_err(|e| Error::Config(format!("bad CSV value {s:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok((columns, rows))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Path of the JSON summary written next to a CSV output.
    pub fn summary_path(out: &Path) -> PathBuf {
        out.with_extension("json")
    }

    /// Writes the record to `config.out`. CSV output gets a JSON summary alongside;
    /// JSON output holds the rows inline. Every file is written atomically.
    pub fn write(&self) -> Result<Vec<PathBuf>> {
        let Some(out) = &self.config.out else {
            return Ok(Vec::new());
        };
        match self.config.format {
            Format::Json => {
                write_atomic(out, &serde_json::to_vec_pretty(self)?)?;
                Ok(vec![out.clone()])
            }
            Format::Csv => {
                let summary_path = Self::summary_path(out);
                if summary_path == *out {
                    return Err(Error::Config(format!("CSV output {} must not end in .json", out.display())));
                }
                let mut summary = self.clone();
                summary.rows = None;
                write_atomic(out, &self.to_csv()?)?;
                write_atomic(&summary_path, &serde_json::to_vec_pretty(&summary)?)?;
                Ok(vec![out.clone(), summary_path])
            }
        }
    }
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn unix_now() -> f64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Experiment;

    fn record(out: Option<PathBuf>, format: Format) -> RunRecord {
        let mut config = ExperimentConfig::new(Experiment::Rounding, 3);
        config.out = out;
        config.format = format;
        RunRecord {
            version: LIBRARY_VERSION.into(),
            schema: SCHEMA_VERSION,
            config,
            started_unix: 0.0,
            finished_unix: 1.0,
            columns: vec!["trial".into(), "value".into()],
            rows: Some(vec![vec![0.0, 0.25], vec![1.0, -1e-300]]),
            summary: BTreeMap::new(),
            checks: vec![Check::new(5, "x", 0, "0", true)],
        }
    }

    #[test]
    fn csv_round_trips_exactly() {
        let r = record(None, Format::Csv);
        let (columns, rows) = RunRecord::parse_csv(&r.to_csv().unwrap()).unwrap();
        assert_eq!(columns, r.columns);
        assert_eq!(rows, r.rows().to_vec());
    }

    #[test]
    fn csv_output_writes_summary_alongside() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.csv");
        let r = record(Some(out.clone()), Format::Csv);
        let written = r.write().unwrap();
        assert_eq!(written.len(), 2);
        let summary = RunRecord::read(&RunRecord::summary_path(&out)).unwrap();
        assert!(summary.rows.is_none());
        assert_eq!(summary.config, r.config);
        assert_eq!(std::fs::read(&out).unwrap(), r.to_csv().unwrap());
        let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(leftovers, 2);
    }

    #[test]
    fn json_output_holds_rows() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("run.json");
        let r = record(Some(out.clone()), Format::Json);
        r.write().unwrap();
        assert_eq!(RunRecord::read(&out).unwrap(), r);
    }
}
