//! Run manifests: the fully resolved configuration, master seed, and input
//! digests, written next to every output. Two runs with equal manifests
//! produce equal outputs except for wall-time fields.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use redus_core::data::Dataset;
use redus_core::train::TrainConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub n: usize,
    pub d: usize,
    pub classes: usize,
    pub separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    /// Input file path, or "synthetic".
    pub source: String,
    /// SHA-256 of the input file bytes, or of the generated dataset's
    /// binary encoding for synthetic data.
    pub digest_sha256: String,
    pub rows: usize,
    pub features: usize,
    pub classes: usize,
    pub has_header: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_column: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthParams>,
    pub test_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FedManifest {
    pub clients: usize,
    pub rounds: u32,
    pub reset_weights: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepManifest {
    pub steps: usize,
    pub repeats: u32,
    pub thresholds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact_version: String,
    pub command: String,
    pub master_seed: u64,
    pub dataset: DatasetManifest,
    pub hidden_layers: Vec<usize>,
    pub dropout: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train: Option<TrainConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fed: Option<FedManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepManifest>,
}

pub fn artifact_version() -> String {
    env!("CARGO_PKG_VERSION").to_owned()
}

pub fn file_digest(path: &std::path::Path) -> std::io::Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn dataset_digest(data: &Dataset) -> String {
    let mut buf = Vec::new();
    data.write_binary(&mut buf).expect("vec write");
    hex::encode(Sha256::digest(&buf))
}
