//! Reproducible random streams for parallel Monte-Carlo work.
//!
//! A `RngStream` is a value-semantic counter-based generator: the pair
//! `(seed, stream_id)` fully determines the sequence, and distinct stream
//! ids select provably non-overlapping ChaCha streams. Workers never share
//! a stream; each trial block gets its own id derived from the run seed and
//! the block coordinates, so any parallel schedule reproduces the same
//! draws.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};

/// A deterministic, splittable random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    draw_counter: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        RngStream { seed, stream_id, draw_counter: 0, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of generator invocations so far.
    pub fn draw_counter(&self) -> u64 {
        self.draw_counter
    }

    /// Child stream with an id mixed from this stream's id and `parts`.
    pub fn substream(&self, parts: &[u64]) -> RngStream {
        let mut acc = self.stream_id;
        for &p in parts {
            acc = splitmix64(acc ^ splitmix64(p));
        }
        RngStream::new(self.seed, acc)
    }

    /// Uniform phase on [0, 2*pi).
    pub fn uniform_phase(&mut self) -> f64 {
        self.gen_range(0.0..std::f64::consts::TAU)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.draw_counter += 1;
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.draw_counter += 1;
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.draw_counter += 1;
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.draw_counter += 1;
        self.inner.try_fill_bytes(dest)
    }
}

/// Stream-id mixer for sharding keys such as (point index, block index).
pub fn derive_stream_id(parts: &[u64]) -> u64 {
    let mut acc = 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        acc = splitmix64(acc ^ splitmix64(p));
    }
    acc
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One draw from Gamma(shape, scale).
pub fn sample_gamma(shape: f64, scale: f64, rng: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::Domain(format!("gamma shape must be > 0, got {shape}")));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Domain(format!("gamma scale must be > 0, got {scale}")));
    }
    let dist = Gamma::new(shape, scale)
        .map_err(|e| Error::Domain(format!("gamma parameters rejected: {e}")))?;
    Ok(dist.sample(rng))
}
