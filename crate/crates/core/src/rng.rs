//! Reproducible random streams.
//!
//! Every replicate of an experiment draws from its own [`RngStream`], keyed by
//! a `(master_seed, stream_index)` pair. The pair is expanded into a 256-bit
//! ChaCha8 key with the SplitMix64 finalizer:
//!
//! ```text
//! word_j = mix64(mix64(master_seed ^ LANE_SALT·lane) + mix64(stream_index + (j+1)·GOLDEN))
//! ```
//!
//! `mix64` is a bijection on `u64` with full avalanche (each input bit flips
//! each output bit with probability close to 1/2), so neighbouring stream
//! indices yield unrelated keys. The same pair always yields the same
//! sequence, on every platform.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const LANE_SALT: u64 = 0xd1b5_4a32_d192_ed03;

/// SplitMix64 finalizer (Steele, Lea & Flood).
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Named sub-streams of a replicate, so that tree shape and tie-breaking can
/// be seeded independently of each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Lane {
    Main = 0,
    Tree = 1,
    Ties = 2,
    Cuts = 3,
    Labels = 4,
    Bernoulli = 5,
    Conditioned = 6,
    Attach = 7,
}

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    lane: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        Self::with_lane(master_seed, stream_index, Lane::Main as u64)
    }

    fn with_lane(master_seed: u64, stream_index: u64, lane: u64) -> Self {
        let key = derive_key(master_seed, stream_index, lane);
        Self {
            master_seed,
            stream_index,
            lane,
            rng: ChaCha8Rng::from_seed(key),
        }
    }

    /// A fresh stream for `lane` of the same replicate. Independent of the
    /// parent's position: forking before or after drawing gives the same
    /// child.
    pub fn fork(&self, lane: Lane) -> Self {
        Self::with_lane(self.master_seed, self.stream_index, self.lane.wrapping_mul(31) + lane as u64 + 1)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }
}

fn derive_key(master_seed: u64, stream_index: u64, lane: u64) -> [u8; 32] {
    let base = mix64(master_seed ^ LANE_SALT.wrapping_mul(lane));
    let mut key = [0u8; 32];
    for (j, chunk) in key.chunks_exact_mut(8).enumerate() {
        let s = mix64(stream_index.wrapping_add((j as u64 + 1).wrapping_mul(GOLDEN)));
        chunk.copy_from_slice(&mix64(base.wrapping_add(s)).to_le_bytes());
    }
    key
}

impl RngCore for RngStream {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    #[inline]
    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
