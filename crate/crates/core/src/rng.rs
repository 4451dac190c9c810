//! Counter-based seeding of independent random substreams.
//!
//! Every consumer of randomness derives its own generator from
//! `(root seed, stream, counter)`, so the draws for iteration `m` of one
//! stream never depend on how many values another stream consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Named substreams of a run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Prior = 1,
    Simulation = 2,
    Bandit = 3,
    CalibrationPrior = 4,
    CalibrationSimulation = 5,
    Observed = 6,
    Pool = 7,
    Subset = 8,
    Cell = 9,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for element `counter` of `stream` under `root`.
pub fn stream_seed(root: u64, stream: Stream, counter: u64) -> u64 {
    let a = splitmix64(root ^ splitmix64(stream as u64));
    splitmix64(a ^ splitmix64(counter.wrapping_add(0x6A09_E667_F3BC_C909)))
}

pub fn stream_rng(root: u64, stream: Stream, counter: u64) -> StreamRng {
    StreamRng::seed_from_u64(stream_seed(root, stream, counter))
}
