//! Deterministic random-stream derivation.
//!
//! All randomness in the crate flows through [`stream_rng`] so that results
//! are a pure function of the user-supplied seeds, independent of thread
//! scheduling: tree `t` of a forest always draws from stream `(seed, t)`,
//! split `k` of a plan from `(seed', k)`, and so on.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; decorrelates nearby seed values.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `(seed, tag)`.
pub fn derive_seed(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}

/// A ChaCha stream addressed by `(seed, stream)`. Streams with the same seed
/// but different stream numbers are independent.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
