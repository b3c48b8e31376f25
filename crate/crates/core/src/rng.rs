//! Seeded random streams.
//!
//! Every logical consumer (cloud sampling, test-function families, starting
//! points) draws from its own ChaCha stream selected by a fixed label, so
//! adding a new consumer never shifts the numbers an existing one sees.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Returns the stream `label` of the generator seeded with `seed`.
pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(label.as_bytes()));
    rng
}

/// A seed for a sub-computation, drawn from the stream `label`.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    stream(seed, label).next_u64()
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}
