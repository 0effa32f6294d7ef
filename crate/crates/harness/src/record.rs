use std::fmt::Write as _;
use std::path::Path;

use husimi_grid::loglog_fit;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// One observable of one run. Hard checks carry a tolerance and a verdict;
/// reported quantities carry neither.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub run: String,
    pub observable: String,
    pub value: f64,
    pub hbar: f64,
    pub n: usize,
    pub t: f64,
    pub tolerance: Option<f64>,
    pub passed: Option<bool>,
}

impl SweepRecord {
    pub fn is_hard(&self) -> bool {
        self.passed.is_some()
    }
}

/// Collects the records of one run.
#[derive(Clone, Debug)]
pub struct RecordSink {
    pub run: String,
    pub hbar: f64,
    pub n: usize,
    pub records: Vec<SweepRecord>,
}

impl RecordSink {
    pub fn new(run: impl Into<String>, hbar: f64, n: usize) -> Self {
        Self {
            run: run.into(),
            hbar,
            n,
            records: Vec::new(),
        }
    }

    pub fn report(&mut self, observable: &str, value: f64, t: f64) {
        self.push(observable, value, t, None);
    }

    /// Hard check `value <= tolerance`.
    pub fn check(&mut self, observable: &str, value: f64, tolerance: f64, t: f64) -> bool {
        self.push(observable, value, t, Some(tolerance))
    }

    fn push(&mut self, observable: &str, value: f64, t: f64, tolerance: Option<f64>) -> bool {
        let passed = tolerance.map(|tol| value <= tol);
        self.records.push(SweepRecord {
            run: self.run.clone(),
            observable: observable.to_string(),
            value,
            hbar: self.hbar,
            n: self.n,
            t,
            tolerance,
            passed,
        });
        passed.unwrap_or(true)
    }

    pub fn failures(&self) -> Vec<&SweepRecord> {
        self.records
            .iter()
            .filter(|r| r.passed == Some(false))
            .collect()
    }
}

pub fn write_records(records: &[SweepRecord], dir: &Path) -> Result<(), HarnessError> {
    std::fs::write(
        dir.join("records.json"),
        serde_json::to_string_pretty(records)?,
    )?;
    std::fs::write(dir.join("summary.csv"), summary_csv(records))?;
    Ok(())
}

pub fn read_records(dir: &Path) -> Result<Vec<SweepRecord>, HarnessError> {
    let text = std::fs::read_to_string(dir.join("records.json"))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn summary_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from("run,observable,value,hbar,n,t,tolerance,passed\n");
    for r in records {
        let tol = r.tolerance.map(|t| format!("{t:e}")).unwrap_or_default();
        let passed = r.passed.map(|p| p.to_string()).unwrap_or_default();
        writeln!(
            s,
            "{},{},{:e},{},{},{},{},{}",
            r.run, r.observable, r.value, r.hbar, r.n, r.t, tol, passed
        )
        .unwrap();
    }
    s
}

fn field_of(rows: &[&SweepRecord], field: &str) -> Option<f64> {
    let first = rows.first()?;
    match field {
        "hbar" => Some(first.hbar),
        "n" => Some(first.n as f64),
        "t" => Some(first.t),
        name => rows.iter().find(|r| r.observable == name).map(|r| r.value),
    }
}

/// Log-log least squares of `y_field` against `x_field` over runs. Either
/// field is `hbar`, `n`, `t` or an observable name; runs lacking the
/// observable are skipped.
pub fn fit_slope(
    records: &[SweepRecord],
    x_field: &str,
    y_field: &str,
) -> Result<(f64, f64), HarnessError> {
    let mut runs: Vec<&str> = Vec::new();
    for r in records {
        if !runs.contains(&r.run.as_str()) {
            runs.push(&r.run);
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut offenders = Vec::new();
    for run in runs {
        let rows: Vec<&SweepRecord> = records.iter().filter(|r| r.run == run).collect();
        let (Some(x), Some(y)) = (field_of(&rows, x_field), field_of(&rows, y_field)) else {
            continue;
        };
        if !(x > 0.0 && y > 0.0) {
            offenders.push(format!("{run} ({x_field}={x}, {y_field}={y})"));
        }
        xs.push(x);
        ys.push(y);
    }
    if !offenders.is_empty() {
        return Err(HarnessError::Fit(format!(
            "non-positive values: {}",
            offenders.join(", ")
        )));
    }
    if xs.len() < 3 {
        return Err(HarnessError::Fit(format!(
            "need at least 3 records with {x_field} and {y_field}, got {}",
            xs.len()
        )));
    }
    loglog_fit(&xs, &ys).map_err(|e| HarnessError::Fit(e.to_string()))
}
