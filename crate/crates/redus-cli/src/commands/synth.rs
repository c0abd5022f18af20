//! `redus synth`: write a synthetic CSV dataset consumable by the other
//! commands. Same flags and seed always produce a byte-identical file.

use redus_core::data::synth_generate;
use redus_core::rng::{self, RngStream};

use crate::args::SynthArgs;
use crate::config::{resolve, ConfigFile};
use crate::errors::CliResult;
use crate::manifest::{artifact_version, dataset_digest, DatasetManifest, RunManifest, SynthParams};
use crate::output::write_manifest;

pub fn run(args: &SynthArgs) -> CliResult<()> {
    let config = ConfigFile::load(args.config.as_deref())?;
    let params = SynthParams {
        n: resolve(args.n, &config, "n", 2000)?,
        d: resolve(args.d, &config, "d", 10)?,
        classes: resolve(args.classes, &config, "classes", 3)?,
        separation: resolve(args.separation, &config, "separation", 6.0)?,
    };
    let seed: u64 = resolve(args.seed, &config, "seed", 42)?;

    let stream = RngStream::new(seed);
    let data = synth_generate(
        params.n,
        params.d,
        params.classes,
        params.separation,
        &stream.child(rng::SYNTH),
    )?;

    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let file = std::fs::File::create(&args.out)?;
    data.write_csv(std::io::BufWriter::new(file))?;

    let manifest = RunManifest {
        artifact_version: artifact_version(),
        command: "synth".to_owned(),
        master_seed: seed,
        dataset: DatasetManifest {
            source: args.out.display().to_string(),
            digest_sha256: dataset_digest(&data),
            rows: data.len(),
            features: data.feature_count(),
            classes: data.class_count(),
            has_header: true,
            label_column: Some("label".to_owned()),
            synth: Some(params),
            test_fraction: 0.0,
        },
        hidden_layers: Vec::new(),
        dropout: 0.0,
        train: None,
        fed: None,
        sweep: None,
    };
    write_manifest(&args.out.with_extension("manifest.json"), &manifest)?;

    println!(
        "rows={} features={} classes={} path={}",
        data.len(),
        data.feature_count(),
        data.class_count(),
        args.out.display()
    );
    Ok(())
}
