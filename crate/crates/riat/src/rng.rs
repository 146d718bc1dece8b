//! Deterministic random streams.
//!
//! Every stochastic routine in the crate draws from a ChaCha stream addressed
//! by `(seed, stream)`. Streams are independent of each other and of thread
//! scheduling, so any computation that consumes randomness is reproducible
//! bit-for-bit from its seed, including under parallel execution.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Fixed stream identifiers, spaced so module-local offsets cannot collide.
pub mod streams {
    /// Latent long-memory noise in the market-like generator.
    pub const MARKET_FGN: u64 = 1;
    /// Lognormal volume noise in the market-like generator.
    pub const MARKET_VOLUME: u64 = 2;
    /// Random-walk price increments in the market-like generator.
    pub const MARKET_PRICE: u64 = 3;
    /// Standalone synthetic series (iid, Pareto, spliced, fGn).
    pub const SERIES: u64 = 4;
    /// Permutation shuffles.
    pub const SHUFFLE: u64 = 5;
    /// Bootstrap replicate `b` uses stream `BOOTSTRAP_BASE + b`.
    pub const BOOTSTRAP_BASE: u64 = 1 << 32;
}

/// A generator for stream `stream` of master seed `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
