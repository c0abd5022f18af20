//! `redus report`: merge run reports, group by threshold, recompute
//! reductions against the zero-threshold rows, and render a table.
//!
//! All inputs must come from the same dataset (equal digests); mixing
//! datasets is a configuration error.

use std::collections::BTreeMap;

use redus_core::train::{apply_baseline_reductions, SweepRow};

use crate::args::ReportArgs;
use crate::errors::{CliError, CliResult};
use crate::output::{render_sweep_table, write_plot_csv, RunReportFile};

pub fn run(args: &ReportArgs) -> CliResult<()> {
    let mut runs = Vec::new();
    for path in &args.files {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
        let file: RunReportFile = serde_json::from_str(&text)
            .map_err(|e| CliError::data(format!("{}: not a run report: {e}", path.display())))?;
        runs.push((path.clone(), file));
    }

    let first_digest = runs[0].1.manifest.dataset.digest_sha256.clone();
    for (path, file) in &runs {
        if file.manifest.dataset.digest_sha256 != first_digest {
            return Err(CliError::usage(format!(
                "{}: dataset digest differs from {}; reports are not comparable",
                path.display(),
                runs[0].0.display()
            )));
        }
    }

    // Group runs by threshold (exact bit pattern; thresholds come from the
    // same grid formula, so equal cells collide as intended).
    let mut groups: BTreeMap<u64, Vec<&RunReportFile>> = BTreeMap::new();
    for (path, file) in &runs {
        let theta = file
            .manifest
            .train
            .as_ref()
            .map(|t| t.theta)
            .ok_or_else(|| {
                CliError::usage(format!(
                    "{}: manifest carries no training config",
                    path.display()
                ))
            })?;
        groups.entry(theta.to_bits()).or_default().push(file);
    }

    let mut rows: Vec<SweepRow> = Vec::with_capacity(groups.len());
    for (bits, group) in &groups {
        let theta = f64::from_bits(*bits);
        let k = group.len() as f64;
        let mut acc = 0.0;
        let mut loss = 0.0;
        let mut backprops = 0.0;
        let mut epoch_time = 0.0;
        let mut total_time = 0.0;
        for file in group {
            let eval = file.report.final_test.ok_or_else(|| {
                CliError::data("report has no final test metrics".to_owned())
            })?;
            acc += eval.accuracy;
            loss += eval.mean_loss;
            backprops += file.report.total_backprops as f64;
            epoch_time += file.report.avg_epoch_time_s();
            total_time += file.report.total_wall_time_s;
        }
        rows.push(SweepRow {
            theta,
            mean_accuracy: acc / k,
            mean_loss: loss / k,
            mean_total_backprops: backprops / k,
            mean_epoch_time_s: epoch_time / k,
            mean_total_time_s: total_time / k,
            time_red_pct: None,
            acc_red_pct: None,
        });
    }
    rows.sort_by(|a, b| a.theta.total_cmp(&b.theta));

    let with_reductions = rows.len() > 1 && rows.iter().any(|r| r.theta == 0.0);
    if with_reductions {
        apply_baseline_reductions(&mut rows);
    }
    print!("{}", render_sweep_table(&rows, with_reductions));

    if let Some(plot) = &args.plot_out {
        write_plot_csv(plot, &rows)?;
    }
    Ok(())
}
