//! Seed derivation. Each consumer of randomness gets its own ChaCha stream
//! keyed by (master seed, purpose, index), so results do not depend on the
//! order in which nodes are processed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Purpose tag mixed into a derived seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Graph = 1,
    Partition = 2,
    FocusTies = 3,
    Init = 4,
    Train = 5,
    Synthetic = 6,
    TestSubset = 7,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, stream: Stream, index: u64) -> u64 {
    let h = splitmix64(master);
    let h = splitmix64(h ^ (stream as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(h ^ index)
}

pub fn rng_for(master: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stream, index))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
