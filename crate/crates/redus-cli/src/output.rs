//! Output formatting: JSON-lines, CSV tables, and aligned text tables.
//!
//! Metric values are rounded to six significant digits. Configuration
//! echoes (thresholds, learning rates, seeds) keep full precision so a run
//! can be reproduced from its manifest. Wall-clock fields all carry `time`
//! (or `tau_s`) in their name, so determinism checks can strip exactly
//! those.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use redus_core::train::{EpochMetrics, SweepRow, TrainingReport};
use redus_core::util::sig6;

use crate::errors::CliResult;
use crate::manifest::RunManifest;

/// A single run's full output: manifest plus per-epoch report. This is the
/// interchange format `report` consumes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReportFile {
    pub manifest: RunManifest,
    pub report: TrainingReport,
}

/// Keys whose numeric values are configuration, not metrics; they keep full
/// precision when a JSON tree is rounded for output.
const EXACT_KEYS: [&str; 5] = [
    "theta",
    "learning_rate",
    "separation",
    "test_fraction",
    "thresholds",
];

/// Round every numeric leaf to six significant digits except the values of
/// configuration keys.
pub fn round_metrics(value: &mut Value) {
    fn walk(value: &mut Value, exact: bool) {
        match value {
            Value::Number(n) => {
                if exact {
                    return;
                }
                if let Some(f) = n.as_f64() {
                    if n.is_f64() {
                        if let Some(rounded) = serde_json::Number::from_f64(sig6(f)) {
                            *n = rounded;
                        }
                    }
                }
            }
            Value::Object(map) => {
                for (k, v) in map.iter_mut() {
                    walk(v, EXACT_KEYS.contains(&k.as_str()));
                }
            }
            Value::Array(items) => {
                for v in items {
                    walk(v, exact);
                }
            }
            _ => {}
        }
    }
    walk(value, false);
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut tree = serde_json::to_value(value)?;
    round_metrics(&mut tree);
    let mut file = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, &tree)?;
    writeln!(file)?;
    Ok(())
}

/// Manifest JSON is written without rounding: it is configuration.
pub fn write_manifest(path: &Path, manifest: &RunManifest) -> CliResult<()> {
    let mut file = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut file, manifest)?;
    writeln!(file)?;
    Ok(())
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let mut file = fs::File::create(path)?;
    for row in rows {
        let mut tree = serde_json::to_value(row)?;
        round_metrics(&mut tree);
        serde_json::to_writer(&mut file, &tree)?;
        writeln!(file)?;
    }
    Ok(())
}

fn fmt_metric(x: f64) -> String {
    format!("{}", sig6(x))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_metric).unwrap_or_default()
}

/// Per-epoch CSV mirroring the JSON-lines fields; wall time is the last
/// column.
pub fn write_epochs_csv(path: &Path, epochs: &[EpochMetrics]) -> CliResult<()> {
    let mut out = String::new();
    out.push_str(
        "epoch,included_samples,backprop_count,train_loss,train_accuracy,epsilon,alpha,fallback_used,wall_time_s\n",
    );
    for e in epochs {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            e.epoch,
            e.included_samples,
            e.backprop_count,
            fmt_metric(e.train_loss),
            fmt_metric(e.train_accuracy),
            fmt_opt(e.epsilon),
            fmt_opt(e.alpha),
            e.fallback_used,
            fmt_metric(e.wall_time_s),
        )
        .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

fn fmt_theta(theta: f64) -> String {
    if theta == 0.0 {
        "0".to_owned()
    } else {
        format!("{:e}", sig6(theta))
    }
}

/// Threshold comparison CSV: one row per grid point, reductions relative to
/// the zero-threshold baseline (empty = not applicable).
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> CliResult<()> {
    let mut out = String::new();
    out.push_str("threshold,acc_pct,loss,avg_time_s,time_red_pct,acc_red_pct\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_theta(r.theta),
            fmt_metric(r.mean_accuracy * 100.0),
            fmt_metric(r.mean_loss),
            fmt_metric(r.mean_epoch_time_s),
            r.time_red_pct.map(fmt_metric).unwrap_or_else(|| "N/A".into()),
            r.acc_red_pct.map(fmt_metric).unwrap_or_else(|| "N/A".into()),
        )
        .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

/// Aligned text table of sweep rows for stdout.
pub fn render_sweep_table(rows: &[SweepRow], with_reductions: bool) -> String {
    let mut header = vec![
        "threshold".to_owned(),
        "acc_pct".to_owned(),
        "loss".to_owned(),
        "avg_time_s".to_owned(),
    ];
    if with_reductions {
        header.push("time_red_pct".to_owned());
        header.push("acc_red_pct".to_owned());
    }
    let mut table: Vec<Vec<String>> = vec![header];
    for r in rows {
        let label = if r.theta == 0.0 {
            "0 (baseline)".to_owned()
        } else {
            fmt_theta(r.theta)
        };
        let mut row = vec![
            label,
            fmt_metric(r.mean_accuracy * 100.0),
            fmt_metric(r.mean_loss),
            fmt_metric(r.mean_epoch_time_s),
        ];
        if with_reductions {
            row.push(r.time_red_pct.map(fmt_metric).unwrap_or_else(|| "N/A".into()));
            row.push(r.acc_red_pct.map(fmt_metric).unwrap_or_else(|| "N/A".into()));
        }
        table.push(row);
    }

    let columns = table[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|c| table.iter().map(|row| row[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &table {
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                out.push_str("  ");
            }
            write!(out, "{cell:<width$}", width = widths[c]).expect("string write");
        }
        out.push('\n');
    }
    out
}

/// Plot-ready CSV: threshold on x, accuracy and time as series.
pub fn write_plot_csv(path: &Path, rows: &[SweepRow]) -> CliResult<()> {
    let mut out = String::new();
    out.push_str("threshold,acc_pct,avg_time_s\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{}",
            fmt_theta(r.theta),
            fmt_metric(r.mean_accuracy * 100.0),
            fmt_metric(r.mean_epoch_time_s),
        )
        .expect("string write");
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_spares_configuration_keys() {
        let mut v = json!({
            "theta": 2.204585537918871e-7,
            "learning_rate": 0.010000000000000002,
            "train_loss": 0.123456789,
            "nested": {"alpha": 1.0986122886681098, "theta": 0.3333333333333333},
        });
        round_metrics(&mut v);
        assert_eq!(v["theta"], json!(2.204585537918871e-7));
        assert_eq!(v["learning_rate"], json!(0.010000000000000002));
        assert_eq!(v["train_loss"], json!(0.123457));
        assert_eq!(v["nested"]["alpha"], json!(1.09861));
        assert_eq!(v["nested"]["theta"], json!(0.3333333333333333));
    }

    #[test]
    fn theta_formatting() {
        assert_eq!(fmt_theta(0.0), "0");
        assert_eq!(fmt_theta(2.204585537918871e-7), "2.20459e-7");
    }
}
