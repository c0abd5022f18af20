//! `redus fed`: in-process federated simulation, one JSON line per round.

use serde::Serialize;

use redus_core::fed::{run_rounds, FederatedConfig};
use redus_core::rng::RngStream;
use redus_core::util::sig6;

use crate::args::FedArgs;
use crate::config::{resolve, ConfigFile};
use crate::errors::CliResult;
use crate::manifest::{artifact_version, FedManifest, RunManifest};
use crate::output::{ensure_dir, write_json, write_jsonl, write_manifest};

use super::common::{build_specs, resolve_data, resolve_train};

#[derive(Serialize)]
struct FedSummary {
    rounds: u32,
    clients: usize,
    final_global_acc: f64,
    final_global_loss: f64,
    total_backprops: u64,
    total_client_wall_time_s: f64,
}

pub fn run(args: &FedArgs) -> CliResult<()> {
    let config = ConfigFile::load(args.train.config.as_deref())?;
    let rt = resolve_train(&args.train, &config, "out/fed")?;
    let rd = resolve_data(&args.data, &config, rt.cfg.seed)?;

    let fed_cfg = FederatedConfig {
        clients: resolve(args.clients, &config, "clients", 5)?,
        rounds: resolve(args.rounds, &config, "rounds", 50)?,
        reset_weights: resolve(args.reset_weights, &config, "reset_weights", true)?,
        train: rt.cfg,
    };

    let manifest = RunManifest {
        artifact_version: artifact_version(),
        command: "fed".to_owned(),
        master_seed: rt.cfg.seed,
        dataset: rd.manifest.clone(),
        hidden_layers: rt.hidden_layers.clone(),
        dropout: rt.dropout,
        train: Some(rt.cfg),
        fed: Some(FedManifest {
            clients: fed_cfg.clients,
            rounds: fed_cfg.rounds,
            reset_weights: fed_cfg.reset_weights,
        }),
        sweep: None,
    };

    let specs = build_specs(
        rd.train.feature_count(),
        &rt.hidden_layers,
        rd.train.class_count(),
        rt.dropout,
    )?;
    let master = RngStream::new(rt.cfg.seed);
    let run = run_rounds(&rd.train, &rd.test, &specs, &fed_cfg, &master)?;

    ensure_dir(&rt.out)?;
    write_manifest(&rt.out.join("manifest.json"), &manifest)?;
    write_jsonl(&rt.out.join("rounds.jsonl"), &run.metrics)?;

    let last = run.final_metrics();
    let total_backprops: u64 = run
        .metrics
        .iter()
        .flat_map(|m| m.per_client.iter())
        .map(|c| c.backprops)
        .sum();
    let total_time: f64 = run.metrics.iter().map(|m| m.summed_client_wall_time_s).sum();
    let summary = FedSummary {
        rounds: run.rounds,
        clients: fed_cfg.clients,
        final_global_acc: last.global_accuracy,
        final_global_loss: last.global_loss,
        total_backprops,
        total_client_wall_time_s: total_time,
    };
    write_json(&rt.out.join("summary.json"), &summary)?;

    println!(
        "rounds={} clients={} final_global_acc_pct={} final_global_loss={} total_backprops={} total_client_wall_time_s={}",
        run.rounds,
        fed_cfg.clients,
        sig6(last.global_accuracy * 100.0),
        sig6(last.global_loss),
        total_backprops,
        sig6(total_time),
    );
    Ok(())
}
