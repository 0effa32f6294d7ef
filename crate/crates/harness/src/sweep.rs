use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use husimi_residues::{alpha_exponents, AlphaExponent};
use serde::{Deserialize, Serialize};

use crate::record::{fit_slope, read_records, SweepRecord};
use crate::run::{run_experiment, FAILED_MARKER};
use crate::HarnessError;
use crate::RunConfig;

/// Runs every config on up to `jobs` workers. Each run owns its directory;
/// results come back in config order.
pub fn run_sweep(configs: &[RunConfig], jobs: usize) -> Vec<Result<PathBuf, HarnessError>> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<PathBuf, HarnessError>>>> =
        configs.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, configs.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(c) = configs.get(i) else { break };
                *slots[i].lock().unwrap() = Some(run_experiment(c));
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every slot is filled"))
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SlopeRow {
    pub observable: String,
    pub x_field: String,
    pub slope: f64,
    pub r2: f64,
}

/// Aggregate of completed runs, ordered by decreasing `hbar`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepSummary {
    pub runs: Vec<String>,
    pub hbars: Vec<f64>,
    pub ns: Vec<usize>,
    pub failed_runs: Vec<String>,
    pub slopes: Vec<SlopeRow>,
    /// Mean-field pairing below the semiclassical one in every run.
    pub ordering_holds: bool,
    /// Kinetic, semiclassical, mean-field pairings decrease as `hbar` does.
    pub monotone: [bool; 3],
    pub hard_checks: usize,
    pub hard_failures: Vec<SweepRecord>,
    pub exponents: Vec<AlphaExponent>,
}

impl SweepSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

const PAIRINGS: [&str; 3] = [
    "pairing_kinetic",
    "pairing_semiclassical",
    "pairing_meanfield",
];

/// Run directories directly below `root`.
pub fn run_dirs(root: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut dirs: Vec<PathBuf> = std::fs::read_dir(root)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_dir()
                && p.file_name()
                    .is_some_and(|n| n.to_string_lossy().starts_with("run-"))
        })
        .collect();
    dirs.sort();
    Ok(dirs)
}

/// Single-threaded reduce over run directories.
pub fn aggregate(dirs: &[PathBuf]) -> Result<SweepSummary, HarnessError> {
    let mut failed_runs = Vec::new();
    let mut per_run: Vec<Vec<SweepRecord>> = Vec::new();
    for d in dirs {
        if d.join(FAILED_MARKER).exists() || !d.join("records.json").exists() {
            failed_runs.push(d.display().to_string());
            continue;
        }
        per_run.push(read_records(d)?);
    }
    per_run.retain(|r| !r.is_empty());
    per_run.sort_by(|a, b| b[0].hbar.total_cmp(&a[0].hbar).then(a[0].n.cmp(&b[0].n)));
    let value = |rows: &[SweepRecord], name: &str| {
        rows.iter().find(|r| r.observable == name).map(|r| r.value)
    };
    let column =
        |name: &str| -> Vec<f64> { per_run.iter().filter_map(|r| value(r, name)).collect() };
    let kin = column(PAIRINGS[0]);
    let sc = column(PAIRINGS[1]);
    let mf = column(PAIRINGS[2]);
    let decreasing = |v: &[f64]| v.len() >= 2 && v.windows(2).all(|w| w[1] < w[0]);
    let records: Vec<SweepRecord> = per_run.iter().flatten().cloned().collect();
    let mut slopes = Vec::new();
    if per_run.len() >= 3 {
        for name in PAIRINGS
            .iter()
            .chain(&["kinetic_l54", "consistency_defect", "hf_hs_gap"])
        {
            if let Ok((slope, r2)) = fit_slope(&records, "hbar", name) {
                slopes.push(SlopeRow {
                    observable: name.to_string(),
                    x_field: "hbar".into(),
                    slope,
                    r2,
                });
            }
        }
    }
    let d = 1;
    Ok(SweepSummary {
        runs: per_run.iter().map(|r| r[0].run.clone()).collect(),
        hbars: per_run.iter().map(|r| r[0].hbar).collect(),
        ns: per_run.iter().map(|r| r[0].n).collect(),
        failed_runs,
        slopes,
        ordering_holds: !mf.is_empty()
            && mf.len() == sc.len()
            && mf.iter().zip(&sc).all(|(m, s)| m < s),
        monotone: [decreasing(&kin), decreasing(&sc), decreasing(&mf)],
        hard_checks: records.iter().filter(|r| r.is_hard()).count(),
        hard_failures: records
            .iter()
            .filter(|r| r.passed == Some(false))
            .cloned()
            .collect(),
        exponents: alpha_exponents(d),
    })
}
