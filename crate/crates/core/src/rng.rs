//! Named, seeded random streams.
//!
//! Every stochastic process in the simulator draws from its own stream,
//! derived from the run seed and a label. Changing how one process consumes
//! randomness never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// Handle to one reproducible random stream.
pub type Stream = ChaCha12Rng;

/// Labels of the exogenous streams shared by every system variant.
pub mod labels {
    pub const POPULATION: &str = "population";
    pub const ACTIVATION: &str = "activation";
    pub const TRAFFIC: &str = "traffic";
    pub const CHANNEL: &str = "channel";
    pub const PREDICTOR: &str = "predictor";
    pub const TIE_BREAK: &str = "tie-break";
    pub const PAIRING: &str = "pairing";
}

/// Derive the stream for `(seed, label)`.
///
/// The 256-bit ChaCha key is the SHA-256 digest of the little-endian seed
/// followed by the label bytes.
pub fn derive_stream(seed: u64, label: &str) -> Stream {
    Stream::from_seed(stream_key(seed, label))
}

/// Derive a child stream, e.g. a per-variant or per-replication stream.
pub fn derive_child(seed: u64, label: &str, index: u64) -> Stream {
    derive_stream(seed, &format!("{label}/{index}"))
}

fn stream_key(seed: u64, label: &str) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    key
}

/// Seed of replication `rep` of a run started from `base_seed`.
pub fn replication_seed(base_seed: u64, rep: usize) -> u64 {
    let mut stream = derive_child(base_seed, "replication", rep as u64);
    rand::RngCore::next_u64(&mut stream)
}
