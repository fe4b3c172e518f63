//! Counter-based seed splitting: one user seed, independent streams per task.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct SeedSplitter {
    seed: u64,
}

impl SeedSplitter {
    pub fn new(seed: u64) -> Self {
        SeedSplitter { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator for stream `stream`. Streams never overlap, so tasks can run in
    /// any order and still see the same draws.
    pub fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// Stream for a (label, index) pair, e.g. a field and a trial number.
    pub fn rng_for(&self, label: &str, index: u64) -> ChaCha8Rng {
        // FNV-1a over the label; stable across platforms and releases
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in label.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        self.rng(h ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}
