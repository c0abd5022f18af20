//! `redus sweep`: train across the threshold grid, tabulate against the
//! zero-threshold baseline, and keep every cell's raw report.

use redus_core::resample::threshold_grid;
use redus_core::train::sweep_thresholds;

use crate::args::SweepArgs;
use crate::config::{resolve, ConfigFile};
use crate::errors::CliResult;
use crate::manifest::{artifact_version, RunManifest, SweepManifest};
use crate::output::{
    ensure_dir, render_sweep_table, write_json, write_jsonl, write_manifest, write_sweep_csv,
    RunReportFile,
};

use super::common::{build_specs, resolve_data, resolve_train};

pub fn run(args: &SweepArgs) -> CliResult<()> {
    let config = ConfigFile::load(args.train.config.as_deref())?;
    let rt = resolve_train(&args.train, &config, "out/sweep")?;
    let rd = resolve_data(&args.data, &config, rt.cfg.seed)?;
    let steps: usize = resolve(args.steps, &config, "steps", 10)?;
    let repeats: u32 = resolve(args.repeats, &config, "repeats", 5)?;

    let grid = threshold_grid(rd.train.len(), steps)?;
    let manifest = RunManifest {
        artifact_version: artifact_version(),
        command: "sweep".to_owned(),
        master_seed: rt.cfg.seed,
        dataset: rd.manifest.clone(),
        hidden_layers: rt.hidden_layers.clone(),
        dropout: rt.dropout,
        train: Some(rt.cfg),
        fed: None,
        sweep: Some(SweepManifest {
            steps,
            repeats,
            thresholds: grid.clone(),
        }),
    };

    let specs = build_specs(
        rd.train.feature_count(),
        &rt.hidden_layers,
        rd.train.class_count(),
        rt.dropout,
    )?;
    let table = sweep_thresholds(&rd.train, &rd.test, &specs, &grid, &rt.cfg, repeats)?;

    ensure_dir(&rt.out)?;
    write_manifest(&rt.out.join("manifest.json"), &manifest)?;
    write_sweep_csv(&rt.out.join("sweep.csv"), &table.rows)?;
    write_jsonl(&rt.out.join("sweep.jsonl"), &table.rows)?;

    let cells_dir = rt.out.join("cells");
    ensure_dir(&cells_dir)?;
    for cell in &table.cells {
        let theta_index = grid
            .iter()
            .position(|&t| t == cell.theta)
            .unwrap_or(usize::MAX);
        let mut cell_manifest = manifest.clone();
        cell_manifest.train = Some(cell.report.config);
        write_json(
            &cells_dir.join(format!("cell_t{theta_index}_r{}.json", cell.repeat)),
            &RunReportFile {
                manifest: cell_manifest,
                report: cell.report.clone(),
            },
        )?;
    }

    print!("{}", render_sweep_table(&table.rows, true));
    Ok(())
}
