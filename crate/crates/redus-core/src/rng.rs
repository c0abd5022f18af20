//! Seeded, labeled random substreams.
//!
//! Every random decision in the crate (weight init, dropout masks, shuffles,
//! partitioning, synthetic data) draws from an [`RngStream`] derived from the
//! master seed and a label path. Identical (seed, label, draw sequence)
//! yields identical output on every platform: derivation is pure integer
//! arithmetic and the generator is ChaCha8, which is portable by design.
//!
//! Separate labels give statistically independent streams, so e.g. the
//! shuffle order of an epoch never depends on how many dropout masks were
//! drawn before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const INIT: &str = "init";
pub const DROPOUT: &str = "dropout";
pub const SHUFFLE: &str = "shuffle";
pub const PARTITION: &str = "partition";
pub const SYNTH: &str = "synth";
pub const SPLIT: &str = "split";

/// A named point in the seed-derivation tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    label: String,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream {
            seed,
            label: "root".to_owned(),
        }
    }

    /// Derive the named substream. Different labels under the same parent
    /// are independent; the same label always yields the same stream.
    pub fn child(&self, label: &str) -> Self {
        RngStream {
            seed: splitmix64(self.seed ^ fnv1a(label.as_bytes())),
            label: format!("{}/{}", self.label, label),
        }
    }

    /// Derive an indexed substream, e.g. per client, per round, per repeat.
    pub fn child_idx(&self, label: &str, idx: u64) -> Self {
        self.child(label).child(&idx.to_string())
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Instantiate the generator at this point of the tree.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}
