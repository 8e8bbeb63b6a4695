//! Seeded substreams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! 64-bit seed and selected by a 64-bit stream id. ChaCha is counter based,
//! so stream `k` of a seed is available without generating streams `0..k`,
//! which keeps Monte Carlo realizations independent of scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids are laid out as `realization * STREAMS_PER_REALIZATION + purpose`.
pub const STREAMS_PER_REALIZATION: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Channel = 0,
    Initialization = 1,
}

pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn realization_stream(seed: u64, realization: u64, purpose: Purpose) -> ChaCha8Rng {
    let stream = realization
        .wrapping_mul(STREAMS_PER_REALIZATION)
        .wrapping_add(purpose as u64);
    substream(seed, stream)
}
