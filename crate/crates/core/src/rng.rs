//! Seeded random streams.
//!
//! Every randomized routine draws from ChaCha20 (`rand_chacha::ChaCha20Rng`),
//! a counter-based generator whose output is identical on every platform. A
//! `(seed, stream)` pair selects an independent stream, so trial `i` of a
//! campaign seeded with `s` always sees `stream(s, i)` regardless of how
//! trials are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

pub use rand::Rng;

pub type StreamRng = ChaCha20Rng;

pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}
