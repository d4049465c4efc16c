//! Deterministic per-replica random streams.
//!
//! Each replica draws from ChaCha8 keyed by `(master seed, family)` on its
//! own 64-bit stream id `(L << 32) | replica`. Distinct `(L, replica)` pairs
//! within a family therefore never share a stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReplicaSeed {
    pub master: u64,
    /// Separates independent experiment families (e.g. one per beta).
    pub family: u64,
    pub stream: u64,
}

impl ReplicaSeed {
    pub fn new(master: u64, family: u64, side: usize, replica: usize) -> Self {
        assert!(side < 1 << 32 && replica < 1 << 32, "stream id overflow");
        Self {
            master,
            family,
            stream: ((side as u64) << 32) | replica as u64,
        }
    }

    pub fn rng(&self) -> SimRng {
        let mut key = [0u8; 32];
        let mut sm = SplitMix64(self.master ^ self.family.rotate_left(32));
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&sm.next().to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.stream);
        rng
    }
}

/// Stream from a single seed, for one-off runs.
pub fn rng_from_seed(seed: u64) -> SimRng {
    ReplicaSeed {
        master: seed,
        family: 0,
        stream: 0,
    }
    .rng()
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}
