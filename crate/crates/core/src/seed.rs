//! Deterministic, splittable random streams.
//!
//! Every random draw in the toolkit comes from a [`SeedStream`], identified by a
//! `(master_seed, stream_index)` pair. The stream is a ChaCha8 generator keyed by
//! the master seed and positioned on the ChaCha stream selected by the index, so
//! the sequence is a pure function of the pair and distinct indices never overlap.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream-index domains. Searches draw HPs and evaluate trials on disjoint index
/// ranges so that changing one family of draws never shifts the other.
pub(crate) const SAMPLE_DOMAIN: u64 = 0;
pub(crate) const EVAL_DOMAIN: u64 = 1 << 62;
pub(crate) const CHILD_DOMAIN: u64 = 2 << 62;
pub(crate) const SUBSAMPLE_DOMAIN: u64 = 3 << 62;
pub(crate) const STREAM_DOMAIN_MASK: u64 = 3 << 62;

/// A reproducible random stream.
#[derive(Debug, Clone)]
pub struct SeedStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

/// Build the stream for `(master_seed, stream_index)`.
pub fn derive_seed(master_seed: u64, stream_index: u64) -> SeedStream {
    SeedStream::new(master_seed, stream_index)
}

impl SeedStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform draw on `[-1, 1)`.
    pub fn symmetric_unit(&mut self) -> f64 {
        self.rng.random::<f64>() * 2.0 - 1.0
    }

    /// Uniform draw on `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Mutable access to the underlying generator, for `rand` adaptors.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl RngCore for SeedStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Master seed for the `index`-th child experiment of `master_seed`.
///
/// Used wherever a whole run (not a single draw) needs its own seed, e.g. the
/// attempts of a rerun-until-success strategy.
pub fn child_seed(master_seed: u64, index: u64) -> u64 {
    SeedStream::new(master_seed, CHILD_DOMAIN | index).next_u64()
}
