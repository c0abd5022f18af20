//! Shared resolution of dataset and training options for train/fed/sweep.

use std::path::PathBuf;

use redus_core::data::{fit_normalize, load_csv, split, synth_generate, CsvOptions, Dataset};
use redus_core::nn::LayerSpec;
use redus_core::rng::{self, RngStream};
use redus_core::train::{TrainConfig, TrainMode};

use crate::args::{DataArgs, ModeArg, TrainOpts};
use crate::config::{resolve, ConfigFile};
use crate::errors::{CliError, CliResult};
use crate::manifest::{dataset_digest, file_digest, DatasetManifest, SynthParams};

pub struct ResolvedData {
    pub train: Dataset,
    pub test: Dataset,
    pub manifest: DatasetManifest,
}

pub struct ResolvedTrain {
    pub cfg: TrainConfig,
    pub hidden_layers: Vec<usize>,
    pub dropout: f64,
    pub out: PathBuf,
}

pub fn resolve_train(
    opts: &TrainOpts,
    config: &ConfigFile,
    default_out: &str,
) -> CliResult<ResolvedTrain> {
    let layers_text: String = resolve(
        opts.layers.clone(),
        config,
        "layers",
        "256,512,256,128".to_owned(),
    )?;
    let hidden_layers = parse_layers(&layers_text)?;
    let mode = match opts.mode {
        Some(ModeArg::Vanilla) => TrainMode::Vanilla,
        Some(ModeArg::Redus) => TrainMode::Redus,
        None => match config.get::<String>("mode")?.as_deref() {
            Some("vanilla") => TrainMode::Vanilla,
            Some("redus") | None => TrainMode::Redus,
            Some(other) => {
                return Err(CliError::usage(format!(
                    "mode must be vanilla or redus, got {other:?}"
                )))
            }
        },
    };
    let cfg = TrainConfig {
        epochs: resolve(opts.epochs, config, "epochs", 10)?,
        batch_size: resolve(opts.batch_size, config, "batch_size", 32)?,
        learning_rate: resolve(opts.lr, config, "lr", 0.01)?,
        theta: resolve(opts.theta, config, "theta", 0.0)?,
        seed: resolve(opts.seed, config, "seed", 42)?,
        mode,
    };
    Ok(ResolvedTrain {
        cfg,
        hidden_layers,
        dropout: resolve(opts.dropout, config, "dropout", 0.2)?,
        out: resolve(opts.out.clone(), config, "out", PathBuf::from(default_out))?,
    })
}

pub fn parse_layers(text: &str) -> CliResult<Vec<usize>> {
    let widths: Result<Vec<usize>, _> = text
        .split(',')
        .map(|part| part.trim().parse::<usize>())
        .collect();
    let widths =
        widths.map_err(|_| CliError::usage(format!("cannot parse layer widths {text:?}")))?;
    if widths.is_empty() || widths.contains(&0) {
        return Err(CliError::usage("layer widths must be positive"));
    }
    Ok(widths)
}

pub fn resolve_data(
    args: &DataArgs,
    config: &ConfigFile,
    master_seed: u64,
) -> CliResult<ResolvedData> {
    let test_fraction: f64 = resolve(args.test_fraction, config, "test_fraction", 0.2)?;
    if !(0.0..1.0).contains(&test_fraction) || test_fraction == 0.0 {
        return Err(CliError::usage(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let stream = RngStream::new(master_seed);

    let data_path = match args.data.clone() {
        Some(p) => Some(p),
        None => config.get::<PathBuf>("data")?,
    };
    let (full, manifest) = match (&data_path, args.synth) {
        (Some(_), true) => {
            return Err(CliError::usage("--data and --synth are mutually exclusive"));
        }
        (None, false) => {
            return Err(CliError::usage("pass --data FILE or --synth"));
        }
        (Some(path), false) => {
            let has_header = !args.no_header;
            let label_column = if has_header {
                Some(resolve(
                    args.label_column.clone(),
                    config,
                    "label_column",
                    "label".to_owned(),
                )?)
            } else {
                None
            };
            let load = load_csv(
                path,
                &CsvOptions {
                    has_header,
                    label_column: label_column.clone(),
                },
            )?;
            if !load.dropped.is_empty() {
                log::warn!(
                    "{}: dropped {} malformed rows",
                    path.display(),
                    load.dropped.len()
                );
            }
            let manifest = DatasetManifest {
                source: path.display().to_string(),
                digest_sha256: file_digest(path)?,
                rows: load.dataset.len(),
                features: load.dataset.feature_count(),
                classes: load.dataset.class_count(),
                has_header,
                label_column,
                synth: None,
                test_fraction,
            };
            (load.dataset, manifest)
        }
        (None, true) => {
            let params = SynthParams {
                n: resolve(args.synth_n, config, "synth_n", 2000)?,
                d: resolve(args.synth_d, config, "synth_d", 10)?,
                classes: resolve(args.synth_classes, config, "synth_classes", 3)?,
                separation: resolve(args.synth_separation, config, "synth_separation", 6.0)?,
            };
            let data = synth_generate(
                params.n,
                params.d,
                params.classes,
                params.separation,
                &stream.child(rng::SYNTH),
            )?;
            let manifest = DatasetManifest {
                source: "synthetic".to_owned(),
                digest_sha256: dataset_digest(&data),
                rows: data.len(),
                features: data.feature_count(),
                classes: data.class_count(),
                has_header: true,
                label_column: None,
                synth: Some(params),
                test_fraction,
            };
            (data, manifest)
        }
    };

    let (train_raw, test_raw) = split(
        &full,
        (1.0 - test_fraction, test_fraction),
        &stream.child(rng::SPLIT),
    )?;
    let (train, stats) = fit_normalize(&train_raw, None)?;
    let (test, _) = fit_normalize(&test_raw, Some(&stats))?;
    Ok(ResolvedData {
        train,
        test,
        manifest,
    })
}

pub fn build_specs(
    feature_count: usize,
    hidden: &[usize],
    class_count: usize,
    dropout: f64,
) -> CliResult<Vec<LayerSpec>> {
    Ok(LayerSpec::stack(
        feature_count,
        hidden,
        class_count,
        dropout,
    )?)
}
