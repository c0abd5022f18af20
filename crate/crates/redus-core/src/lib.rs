//! REDUS: adaptive-resampling training for dense feed-forward networks.
//!
//! The engine maintains one weight per training sample. After every epoch the
//! weights are updated multiplicatively from the current model's mistakes
//! (AdaBoost-style factors), and the next epoch backpropagates only on the
//! samples whose weight is at or above a threshold. Excluded samples keep
//! being re-scored and re-enter when their weight recovers, so the training
//! load concentrates on whatever the model currently gets wrong.
//!
//! The crate also ships an in-process federated simulation: an IID
//! partitioner, per-client local training, and FedAvg aggregation, all
//! deterministic under a single master seed.
//!
//! Module map:
//! - [`rng`]: seeded, labeled random substreams (the determinism contract).
//! - [`nn`]: dense network, softmax/cross-entropy, analytic backprop, SGD.
//! - [`resample`]: the sample-weight table, its update rule, and selection.
//! - [`data`]: CSV ingestion, min-max normalization, splits, synthetic data.
//! - [`train`]: epoch orchestration, metrics, threshold sweeps.
//! - [`fed`]: partition / local-train / aggregate round loop.

pub mod data;
pub mod error;
pub mod fed;
pub mod nn;
pub mod resample;
pub mod rng;
pub mod train;
pub mod util;

pub use error::{Error, Result};
