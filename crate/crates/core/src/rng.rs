//! Counter-based seed derivation.
//!
//! A [`Seed`] names one ChaCha keystream. Substreams are derived by pure
//! functions of the parent seed and an index, so replicate `i` of a batch
//! produces the same draws regardless of scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

pub type SimRng = ChaCha12Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed {
    key: u64,
    stream: u64,
}

impl Seed {
    pub const fn new(master: u64) -> Self {
        Seed { key: master, stream: 0 }
    }

    /// Child stream `index` of this seed.
    pub fn substream(self, index: u64) -> Seed {
        Seed { key: splitmix64(self.key ^ splitmix64(self.stream.wrapping_add(0x5851_f42d_4c95_7f2d))), stream: index }
    }

    pub fn key(self) -> u64 {
        self.key
    }

    pub fn stream(self) -> u64 {
        self.stream
    }

    pub fn rng(self) -> SimRng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.key);
        rng.set_stream(self.stream);
        rng
    }
}

impl From<u64> for Seed {
    fn from(master: u64) -> Self {
        Seed::new(master)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
