//! Named, reproducible random streams.
//!
//! A stream is identified by `(seed, stream_id)`. The generator is ChaCha8
//! keyed from the seed with the ChaCha stream counter set to `stream_id`, so
//! the same pair gives the same draws on every platform. Sub-streams are
//! derived from the identifiers alone (never from generator state), which
//! lets parallel workers each own an independent stream whose contents do
//! not depend on scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Well-known child tags so that every (run, stage, purpose) gets its own stream.
pub mod purpose {
    pub const STAGE1_SEARCH: u64 = 0x5354_4731;
    pub const ARCHIVE_TRIM: u64 = 0x5452_494d;
    pub const STAGE2_SEARCH: u64 = 0x5354_4732;
    pub const REPORT: u64 = 0x5245_5054;
    pub const BASELINE: u64 = 0x4241_5345;
    pub const INIT: u64 = 0x494e_4954;
    pub const GENERATION: u64 = 0x4745_4e52;
    pub const INIT_EVAL: u64 = 0x494e_4556;
}

pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        RngStream { seed, stream_id, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh stream derived from this stream's identity and `tag`.
    /// Does not consume or depend on draws already made from `self`.
    pub fn child(&self, tag: u64) -> RngStream {
        RngStream::new(self.seed, derive_stream_id(self.stream_id, tag))
    }

    /// Convenience for `child(a).child(b)`.
    pub fn child2(&self, a: u64, b: u64) -> RngStream {
        RngStream::new(self.seed, derive_stream_id(derive_stream_id(self.stream_id, a), b))
    }

    /// Uniform draw on `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        assert!(n > 0, "index range must be non-empty");
        rand::Rng::random_range(&mut self.inner, 0..n)
    }
}

impl Clone for RngStream {
    /// Clones the identity and the current position.
    fn clone(&self) -> Self {
        RngStream { seed: self.seed, stream_id: self.stream_id, inner: self.inner.clone() }
    }
}

impl std::fmt::Debug for RngStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RngStream")
            .field("seed", &self.seed)
            .field("stream_id", &self.stream_id)
            .field("word_pos", &self.inner.get_word_pos())
            .finish()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

// splitmix64 finalizer
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn derive_stream_id(parent: u64, tag: u64) -> u64 {
    mix(parent.rotate_left(17) ^ mix(tag.wrapping_add(0x9e37_79b9_7f4a_7c15)))
}
