//! Seeded, counter-based random streams.
//!
//! Every consumer derives its own ChaCha stream from `(seed, stream id)`, so
//! the numbers a row or a run sees never depend on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags keep unrelated consumers of one seed apart.
pub mod tag {
    pub const MIXING: u64 = 1;
    pub const SOURCES: u64 = 2;
    pub const INIT: u64 = 3;
    pub const RESEED: u64 = 4;
    pub const TRIAL: u64 = 5;
    pub const TEXTURE: u64 = 6;
}

/// Independent stream for `(seed, tag, index)`.
pub fn stream(seed: u64, tag: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(mix(tag, index));
    rng
}

/// Derives a child seed; used where an API takes a plain `u64` seed.
pub fn child_seed(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(mix(tag, index)))
}

fn mix(tag: u64, index: u64) -> u64 {
    splitmix64(tag.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
