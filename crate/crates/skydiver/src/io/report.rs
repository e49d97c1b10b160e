//! Report emission: full JSON dumps and per-layer CSV summaries with
//! fixed 6-decimal number formatting. Field order is deterministic so
//! identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::sim::{self, HwConfig, SimReport};

#[derive(Serialize)]
struct ReportDoc<'a> {
    #[serde(flatten)]
    report: &'a SimReport,
    balance_ratio_per_layer: Vec<Option<f64>>,
    mean_balance_ratio: Option<f64>,
    frames_per_second: Option<f64>,
    synaptic_ops_per_second: Option<f64>,
}

pub fn write_report_json(report: &SimReport, hw: &HwConfig, path: &Path) -> Result<()> {
    let throughput = sim::throughput_estimate(report, hw).ok();
    let doc = ReportDoc {
        report,
        balance_ratio_per_layer: (0..report.busy.len())
            .map(|l| sim::balance_ratio(report, l))
            .collect(),
        mean_balance_ratio: sim::mean_balance_ratio(report),
        frames_per_second: throughput.as_ref().map(|t| t.frames_per_second),
        synaptic_ops_per_second: throughput.as_ref().map(|t| t.synaptic_ops_per_second),
    };
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    super::atomic_write(path, &bytes)?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.6}"),
        None => String::new(),
    }
}

/// Per-layer summary CSV: `layer,mode,balance_ratio,latency_cycles`.
/// Zero-work layers leave the balance column empty.
pub fn write_report_csv(report: &SimReport, path: &Path) -> Result<()> {
    let mut out = String::from("layer,mode,balance_ratio,latency_cycles\n");
    for l in 0..report.busy.len() {
        let latency: u64 = report.layer_latency[l].iter().sum();
        let _ = writeln!(
            out,
            "{l},{},{},{latency}",
            report.mode,
            fmt_opt(sim::balance_ratio(report, l)),
        );
    }
    super::atomic_write(path, out.as_bytes())?;
    Ok(())
}

/// One row of the schedule-mode comparison matrix.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub mode: String,
    pub layer: usize,
    pub balance_ratio: Option<f64>,
    pub latency_cycles: u64,
    pub total_work: u64,
    pub frames_per_second: Option<f64>,
    /// Baseline latency / this mode's latency within the same APRC
    /// setting; 1.0 for the baseline rows by construction.
    pub throughput_ratio: Option<f64>,
}

/// Comparison CSV:
/// `mode,layer,balance_ratio,latency_cycles,total_work,fps,throughput_ratio`.
pub fn write_compare_csv(rows: &[CompareRow], path: &Path) -> Result<()> {
    let mut out =
        String::from("mode,layer,balance_ratio,latency_cycles,total_work,fps,throughput_ratio\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.mode,
            r.layer,
            fmt_opt(r.balance_ratio),
            r.latency_cycles,
            r.total_work,
            fmt_opt(r.frames_per_second),
            fmt_opt(r.throughput_ratio),
        );
    }
    super::atomic_write(path, out.as_bytes())?;
    Ok(())
}
