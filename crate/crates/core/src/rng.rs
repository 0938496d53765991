//! Deterministic random streams.
//!
//! Every simulation owns a single master seed. Each iteration draws from
//! independent ChaCha streams keyed by `(seed, iteration, purpose)`, so
//! switching e.g. the allocation mode only changes the draws of the market
//! stream and leaves offers, production and replacement untouched.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// What a stream is used for. The discriminant is part of the stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Init = 0,
    Offers = 1,
    Replacement = 2,
    JobMarket = 3,
    Production = 4,
    GoodsMarket = 5,
    Noise = 6,
    Moves = 7,
}

/// Stream for one purpose at one iteration.
pub fn substream(seed: u64, iteration: u64, purpose: Purpose) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((iteration << 8) | purpose as u64);
    rng
}
