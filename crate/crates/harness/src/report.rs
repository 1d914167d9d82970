//! Acceptance table over a set of run records.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::record::{Check, RunRecord};
use crate::{Error, Result};

pub const CRITERIA: [(u32, &str); 13] = [
    (1, "spectral correctness"),
    (2, "junta tightness for MAJ_k"),
    (3, "dictator identity"),
    (4, "correlated-variance sandwich"),
    (5, "random rounding"),
    (6, "soft/hard junta sandwich"),
    (7, "concentration of Σα²"),
    (8, "covering evidence"),
    (9, "weak learner, uniform"),
    (10, "weak learner, anti-block"),
    (11, "memorizing baseline"),
    (12, "uniform convergence"),
    (13, "reproducibility"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotRun,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::NotRun => "not run",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub criterion: u32,
    pub title: String,
    pub status: Status,
    pub checks: Vec<Check>,
}

impl ReportRow {
    pub fn observed(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("{}: {} ({})", c.name, c.observed, c.threshold))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl fmt::Display for ReportRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "criterion {:>2} {:<30} {:<7}", self.criterion, self.title, self.status.to_string())?;
        if !self.checks.is_empty() {
            write!(f, " {}", self.observed())?;
        }
        Ok(())
    }
}

/// One row per acceptance criterion. Extra checks (for example a reproducibility
/// comparison) can be supplied alongside the records.
pub fn report(records: &[RunRecord], extra: &[Check]) -> Result<Vec<ReportRow>> {
    if let Some(first) = records.first() {
        if let Some(other) = records.iter().find(|r| r.version != first.version || r.schema != first.schema) {
            return Err(Error::VersionMismatch {
                first: format!("{} (schema {})", first.version, first.schema),
                second: format!("{} (schema {})", other.version, other.schema),
            });
        }
    }
    let all: Vec<&Check> = records.iter().flat_map(|r| r.checks.iter()).chain(extra).collect();
    Ok(CRITERIA
        .iter()
        .map(|&(criterion, title)| {
            let checks: Vec<Check> = all.iter().filter(|c| c.criterion == criterion).map(|&c| c.clone()).collect();
            let status = if checks.is_empty() {
                Status::NotRun
            } else if checks.iter().all(|c| c.pass) {
                Status::Pass
            } else {
                Status::Fail
            };
            ReportRow {
                criterion,
                title: title.to_string(),
                status,
                checks,
            }
        })
        .collect())
}

pub fn render(rows: &[ReportRow]) -> String {
    rows.iter().map(|r| format!("{r}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Experiment, ExperimentConfig};
    use crate::record::{LIBRARY_VERSION, SCHEMA_VERSION};
    use std::collections::BTreeMap;

    fn record(version: &str, criterion: u32, pass: bool) -> RunRecord {
        RunRecord {
            version: version.into(),
            schema: SCHEMA_VERSION,
            config: ExperimentConfig::new(Experiment::Rounding, 0),
            started_unix: 0.0,
            finished_unix: 0.0,
            columns: vec![],
            rows: None,
            summary: BTreeMap::new(),
            checks: vec![Check::new(criterion, "c", 1, "1", pass)],
        }
    }

    #[test]
    fn missing_experiments_are_not_run() {
        let rows = report(&[record(LIBRARY_VERSION, 5, true)], &[]).unwrap();
        assert_eq!(rows.len(), 13);
        assert_eq!(rows[4].status, Status::Pass);
        assert!(rows.iter().filter(|r| r.criterion != 5).all(|r| r.status == Status::NotRun));
        assert!(render(&rows).contains("not run"));
    }

    #[test]
    fn all_pass_set() {
        let records: Vec<RunRecord> = (1..=12).map(|c| record(LIBRARY_VERSION, c, true)).collect();
        let rows = report(&records, &[Check::new(13, "csv", "identical", "identical", true)]).unwrap();
        assert!(rows.iter().all(|r| r.status == Status::Pass));
    }

    #[test]
    fn one_failure_fails_the_row() {
        let rows = report(&[record("0.1.0", 3, true), record("0.1.0", 3, false)], &[]).unwrap();
        assert_eq!(rows[2].status, Status::Fail);
    }

    #[test]
    fn mixed_versions_are_refused() {
        let err = report(&[record("0.1.0", 1, true), record("0.2.0", 2, true)], &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("0.1.0") && msg.contains("0.2.0"), "{msg}");
    }
}
