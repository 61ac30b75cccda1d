//! Metrics CSV and summary JSON.
//!
//! The CSV has one row per (sweep value, run) followed, per sweep value, by
//! an aggregate row whose `run` column is `mean`. Numbers are written with
//! 17 significant digits, so parsing them back recovers every value exactly.
//! Standard deviations go to `summary.json`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use risv2x_core::connectivity::{EpisodeReport, Summary};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::experiment::{PointResult, SweepVar};

pub const METRICS_HEADER: &str = "sweep_var,sweep_value,run,ccr_v2i,ccr_v2v,ccr_total,objective,mean_reward";
pub const MEAN_RUN: &str = "mean";

/// `x` in scientific notation with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub sweep_var: String,
    pub sweep_value: String,
    /// Run index, or `mean` for aggregate rows.
    pub run: String,
    pub ccr_v2i: f64,
    pub ccr_v2v: f64,
    pub ccr_total: f64,
    pub objective: f64,
    pub mean_reward: f64,
}

impl MetricsRow {
    fn new(var: SweepVar, value: String, run: String, e: &EpisodeReport) -> Self {
        MetricsRow {
            sweep_var: var.as_str().to_string(),
            sweep_value: value,
            run,
            ccr_v2i: e.ccr_v2i,
            ccr_v2v: e.ccr_v2v,
            ccr_total: e.ccr_total,
            objective: e.objective,
            mean_reward: e.mean_reward,
        }
    }

    pub fn is_aggregate(&self) -> bool {
        self.run == MEAN_RUN
    }
}

pub fn metrics_rows(var: SweepVar, points: &[PointResult]) -> Vec<MetricsRow> {
    let mut rows = Vec::new();
    for point in points {
        let value = point.value.to_string();
        for (run, e) in point.report.episodes.iter().enumerate() {
            rows.push(MetricsRow::new(var, value.clone(), run.to_string(), e));
        }
        let r = &point.report;
        let mean = EpisodeReport {
            ccr_v2i: r.ccr_v2i().mean,
            ccr_v2v: r.ccr_v2v().mean,
            ccr_total: r.ccr_total().mean,
            objective: r.objective().mean,
            mean_reward: r.mean_reward().mean,
        };
        rows.push(MetricsRow::new(var, value, MEAN_RUN.to_string(), &mean));
    }
    rows
}

pub fn write_metrics<W: Write>(rows: &[MetricsRow], writer: W) -> csv::Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(METRICS_HEADER.split(','))?;
    for r in rows {
        csv.write_record([
            r.sweep_var.clone(),
            r.sweep_value.clone(),
            r.run.clone(),
            format_f64(r.ccr_v2i),
            format_f64(r.ccr_v2v),
            format_f64(r.ccr_total),
            format_f64(r.objective),
            format_f64(r.mean_reward),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn emit_metrics_csv(rows: &[MetricsRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_metrics(rows, file).map_err(|e| HarnessError::csv(path, e))
}

pub fn read_metrics<R: Read>(reader: R, path: &Path) -> Result<Vec<MetricsRow>> {
    let mut csv = csv::Reader::from_reader(reader);
    let header = csv.headers().map_err(|e| HarnessError::csv(path, e))?;
    if header.iter().ne(METRICS_HEADER.split(',')) {
        return Err(HarnessError::Parse {
            path: path.to_path_buf(),
            message: format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    csv.deserialize()
        .map(|row| row.map_err(|e| HarnessError::csv(path, e)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub sweep_value: String,
    pub runs: usize,
    pub ccr_v2i: Summary,
    pub ccr_v2v: Summary,
    pub ccr_total: Summary,
    pub objective: Summary,
    pub mean_reward: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub sweep_var: String,
    pub policy: String,
    pub base_seed: u64,
    /// How run seeds are derived.
    pub seed_rule: String,
    pub points: Vec<PointSummary>,
}

pub fn summarize(var: SweepVar, policy: &str, base_seed: u64, points: &[PointResult]) -> ExperimentSummary {
    ExperimentSummary {
        sweep_var: var.as_str().to_string(),
        policy: policy.to_string(),
        base_seed,
        seed_rule: "run r of every sweep point uses seed base_seed + r (wrapping u64)".to_string(),
        points: points
            .iter()
            .map(|p| PointSummary {
                sweep_value: p.value.to_string(),
                runs: p.report.runs(),
                ccr_v2i: p.report.ccr_v2i(),
                ccr_v2v: p.report.ccr_v2v(),
                ccr_total: p.report.ccr_total(),
                objective: p.report.objective(),
                mean_reward: p.report.mean_reward(),
            })
            .collect(),
    }
}

pub fn write_summary(summary: &ExperimentSummary, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(summary)?;
    std::fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0, -0.0, 1e-300, 0.9999999999999999, -0.12345678901234568] {
            let text = format_f64(x);
            assert_eq!(text.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{text}");
            let digits = text.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
            assert_eq!(digits, 17);
        }
    }
}
