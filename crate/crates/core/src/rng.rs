//! Seeded random streams.
//!
//! Every stage draws from its own ChaCha8 stream whose seed is a stable hash
//! of `(root seed, stage name, index)`, so a stage's randomness does not
//! depend on which other stages ran or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

/// Child seed for `(root, stage, index)`.
pub fn derive_seed(root: u64, stage: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(root.to_le_bytes());
    hasher.update((stage.len() as u64).to_le_bytes());
    hasher.update(stage.as_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn substream(root: u64, stage: &str, index: u64) -> StreamRng {
    stream(derive_seed(root, stage, index))
}
