// SPDX-License-Identifier: Apache-2.0

//! Text and JSON report emitters.

use std::fmt::Write as _;

use serde::Serialize;

use crate::cost::ResourceReport;
use crate::critical_path::{CriticalPathResult, Throughput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Json,
}

impl ReportFormat {
    pub fn name(self) -> &'static str {
        match self {
            ReportFormat::Text => "text",
            ReportFormat::Json => "json",
        }
    }
}

/// What produced a report: input, ordered passes, configuration source,
/// output format and exit status.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunManifest {
    pub input: String,
    pub passes: Vec<String>,
    pub config: String,
    pub format: ReportFormat,
    pub exit_status: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub manifest: RunManifest,
    pub resources: Option<ResourceReport>,
    pub critical_path: Vec<CriticalPathResult>,
    pub throughput: Option<Throughput>,
}

pub fn emit_report(report: &Report) -> String {
    match report.manifest.format {
        ReportFormat::Text => emit_text(report),
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes") + "\n"
        }
    }
}

fn emit_text(report: &Report) -> String {
    let mut rows: Vec<(String, String)> = Vec::new();
    if let Some(res) = &report.resources {
        let mut kinds: Vec<(String, u64)> = res
            .per_kind_fcs
            .iter()
            .filter(|(_, fcs)| **fcs > 0)
            .map(|(tag, fcs)| (format!("{} (FCs)", tag.label()), *fcs))
            .collect();
        kinds.sort();
        rows.extend(kinds.into_iter().map(|(l, v)| (l, v.to_string())));
        rows.push(("Total FCs".into(), res.total_fcs.to_string()));
        for (label, value) in [
            ("Total HBM (bytes)", res.total_hbm_bytes),
            ("Total DDR (bytes)", res.total_ddr_bytes),
            ("Total Tiles", res.total_tiles),
        ] {
            if value > 0 {
                rows.push((label.into(), value.to_string()));
            }
        }
        rows.push(("Total Mx2 Chips".into(), res.chips.to_string()));
        rows.push(("Boards Mx8".into(), res.boards.to_string()));
    }

    let width = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (label, value) in &rows {
        let _ = writeln!(out, "{label:<width$}  {value}");
    }
    for cp in &report.critical_path {
        let _ = writeln!(
            out,
            "Critical Path ({}): depth {}, latency {}",
            cp.method, cp.depth, cp.latency_unit_time
        );
    }
    if let Some(t) = &report.throughput {
        let _ = writeln!(
            out,
            "Throughput @ batch {}: {} (latency {})",
            t.batch, t.outputs_per_batch_window, t.latency_unit_time
        );
    }
    out
}
