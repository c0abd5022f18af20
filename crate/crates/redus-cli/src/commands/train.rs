//! `redus train`: one training run, epochs written as JSON-lines and CSV.

use redus_core::nn::init_model;
use redus_core::rng::{self, RngStream};
use redus_core::train::{estimate_training_time, evaluate, train_redus, train_vanilla, TrainMode};
use redus_core::util::sig6;

use crate::args::TrainArgs;
use crate::config::ConfigFile;
use crate::errors::CliResult;
use crate::manifest::{artifact_version, RunManifest};
use crate::output::{
    ensure_dir, write_epochs_csv, write_json, write_jsonl, write_manifest, RunReportFile,
};

use super::common::{build_specs, resolve_data, resolve_train};

pub fn run(args: &TrainArgs) -> CliResult<()> {
    let config = ConfigFile::load(args.train.config.as_deref())?;
    let rt = resolve_train(&args.train, &config, "out/train")?;
    let rd = resolve_data(&args.data, &config, rt.cfg.seed)?;

    let manifest = RunManifest {
        artifact_version: artifact_version(),
        command: "train".to_owned(),
        master_seed: rt.cfg.seed,
        dataset: rd.manifest.clone(),
        hidden_layers: rt.hidden_layers.clone(),
        dropout: rt.dropout,
        train: Some(rt.cfg),
        fed: None,
        sweep: None,
    };

    let specs = build_specs(
        rd.train.feature_count(),
        &rt.hidden_layers,
        rd.train.class_count(),
        rt.dropout,
    )?;
    let model = init_model(&specs, &RngStream::new(rt.cfg.seed).child(rng::INIT))?;
    let (model, mut report) = match rt.cfg.mode {
        TrainMode::Vanilla => train_vanilla(model, &rd.train, &rt.cfg)?,
        TrainMode::Redus => train_redus(model, &rd.train, &rt.cfg)?,
    };
    let eval = evaluate(&model, &rd.test)?;
    report.final_test = Some(eval);

    ensure_dir(&rt.out)?;
    write_manifest(&rt.out.join("manifest.json"), &manifest)?;
    write_jsonl(&rt.out.join("epochs.jsonl"), &report.epochs)?;
    write_epochs_csv(&rt.out.join("epochs.csv"), &report.epochs)?;
    write_json(
        &rt.out.join("report.json"),
        &RunReportFile {
            manifest: manifest.clone(),
            report: report.clone(),
        },
    )?;

    let tau = if report.total_backprops > 0 {
        report.total_wall_time_s / report.total_backprops as f64
    } else {
        0.0
    };
    let estimated_full = estimate_training_time(rd.train.len() as u64, tau, rt.cfg.epochs);
    println!(
        "final_test_accuracy_pct={} final_test_loss={} total_backprops={} avg_epoch_time_s={} total_wall_time_s={} tau_s={} est_full_data_time_s={}",
        sig6(eval.accuracy * 100.0),
        sig6(eval.mean_loss),
        report.total_backprops,
        sig6(report.avg_epoch_time_s()),
        sig6(report.total_wall_time_s),
        sig6(tau),
        sig6(estimated_full),
    );
    Ok(())
}
