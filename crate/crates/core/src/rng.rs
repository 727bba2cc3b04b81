//! Seedable generators. Every chain owns a ChaCha stream; independent work
//! (replicates, per-column proposal tables, Monte-Carlo batches) draws from
//! distinct stream ids of the same seed, so results do not depend on
//! scheduling order.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng as ChainRng;

/// Generator for `seed`, positioned on stream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChainRng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Generator on the default stream.
pub fn seeded(seed: u64) -> ChainRng {
    ChainRng::seed_from_u64(seed)
}
