//! Counter-based random streams.
//!
//! Every random object (a codeword, a trial, a shuffle) draws from its own
//! ChaCha8 stream selected by `(seed, stream_index)`; the draw index is the
//! position inside that stream. Results therefore do not depend on how work
//! is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream reserved for permutations (greedy scan order, partition shuffles).
pub const SHUFFLE_STREAM: u64 = u64::MAX;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
