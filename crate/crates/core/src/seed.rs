//! Deterministic seed derivation.
//!
//! Every stochastic job gets its own stream derived from a master seed plus a
//! label and index path, so results never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

/// 64-bit sub-seed from `(master, label, path)`.
pub fn derive_seed(master: u64, label: &str, path: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((label.len() as u64).to_le_bytes());
    h.update(label.as_bytes());
    for p in path {
        h.update(p.to_le_bytes());
    }
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// Private stream for Monte Carlo trial `index` under `master`.
pub fn trial_rng(master: u64, index: u64) -> Rng {
    let mut rng = Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}
