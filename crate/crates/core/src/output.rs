//! CSV results with a JSON metadata sidecar.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::scenarios::{Exclusion, GridInfo, SweepKind, SweepResult};

pub const CSV_HEADER: &str = "key,policy,status,total_w,proc_w,vm_w,traffic_w,bnb_nodes";

/// Floats with 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// The sweep as CSV, one row per (key, policy) in result order.
pub fn csv_string(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        let p = &r.power;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.key,
            r.policy,
            r.status,
            num(p.total_w),
            num(p.proc_w),
            num(p.vm_w),
            num(p.traffic_w),
            r.bnb_nodes
        );
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SavingEntry {
    pub key: String,
    pub saving_pct: f64,
}

/// Contents of the `.meta.json` sidecar.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultMeta {
    pub tool: &'static str,
    pub version: &'static str,
    pub sweep: SweepKind,
    pub seed: u64,
    pub config_sha256: String,
    pub rows: usize,
    pub average_saving_pct: Option<f64>,
    pub savings: Vec<SavingEntry>,
    pub excluded: Vec<Exclusion>,
    pub latency_grid: Option<GridInfo>,
}

impl ResultMeta {
    pub fn new(result: &SweepResult, seed: u64, config_sha256: &str) -> Self {
        ResultMeta {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            sweep: result.kind,
            seed,
            config_sha256: config_sha256.to_string(),
            rows: result.rows.len(),
            average_saving_pct: result.average_saving_pct,
            savings: result
                .savings
                .iter()
                .map(|(k, s)| SavingEntry {
                    key: k.to_string(),
                    saving_pct: *s,
                })
                .collect(),
            excluded: result.excluded.clone(),
            latency_grid: result.grid.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metadata serializes");
        s.push('\n');
        s
    }
}

/// `results.csv` -> `results.meta.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

/// Writes the CSV to `path` and its metadata next to it.
pub fn write_results(result: &SweepResult, path: &Path, meta: &ResultMeta) -> io::Result<()> {
    std::fs::write(path, csv_string(result))?;
    std::fs::write(sidecar_path(path), meta.to_json())
}
