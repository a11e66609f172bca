//! Reproducible random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream identified by a
//! `(seed, stream id)` pair, so results never depend on how work is split
//! across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Purposes that get their own stream inside a simulation iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Request = 1,
    Field = 2,
    Inventory = 3,
    Fading = 4,
    Lifespan = 5,
    Size = 6,
}

/// Stream ids below this are free for callers (catalogue sampling, analytic Monte Carlo, ...).
const ITERATION_BASE: u64 = 1 << 56;

pub fn stream(seed: u64, id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Stream for one purpose within one simulation iteration.
pub fn iteration_stream(seed: u64, iteration: u64, purpose: Purpose) -> Stream {
    debug_assert!(iteration < 1 << 48);
    stream(seed, ITERATION_BASE | (purpose as u64) << 48 | iteration)
}
