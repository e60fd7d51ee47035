//! Reproducible random streams.
//!
//! Every Monte Carlo trial draws from its own ChaCha8 stream, keyed by
//! `(master seed, domain, index)`. The domain separates unrelated consumers
//! (population draws, channel draws, optimizer initialization) so adding a
//! consumer never shifts another one's numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Named stream domains used across the crate.
pub mod domain {
    pub const POPULATION: u64 = 1;
    pub const CHANNEL: u64 = 2;
    pub const OPTIMIZER: u64 = 3;
    pub const WIRETAP: u64 = 4;
    pub const GAMMA: u64 = 5;
    pub const RANDOM_PHASE: u64 = 6;
    pub const CAPACITY_POOL: u64 = 7;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    master: u64,
}

impl SeedStream {
    pub fn new(master: u64) -> Self {
        Self { master }
    }

    pub fn master(&self) -> u64 {
        self.master
    }

    /// Independent stream for `(domain, index)`.
    pub fn rng(&self, domain: u64, index: u64) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(self.master ^ splitmix64(domain)));
        rng.set_stream(index);
        rng
    }

    /// Derives a child seed stream, e.g. one per sweep value.
    pub fn child(&self, tag: u64) -> SeedStream {
        SeedStream::new(splitmix64(self.master.wrapping_add(splitmix64(tag ^ 0xa076_1d64_78bd_642f))))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
