//! Seeded, counter-based random streams.
//!
//! Every random object in the crate is drawn from ChaCha20 (the RFC 7539
//! block function, as implemented by `rand_chacha`). The 256-bit key holds
//! the user seed as a little-endian `u64` followed by zeros; the 64-bit
//! stream id selects an independent keystream. A scan cell `(grid index g,
//! trial t)` uses stream `(g << 32) | t`, so any trial can be regenerated
//! without replaying the ones before it.
//!
//! Published vector: key = 0, stream = 0 produces the words
//! `0xade0b876, 0x903df1a0, 0xe56a5d40, 0x28bd8653, ...`.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Clone, Debug)]
pub struct TrialRng(ChaCha20Rng);

impl TrialRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(stream);
        TrialRng(rng)
    }

    /// Stream for trial `trial` at grid point `grid_index`.
    pub fn for_trial(seed: u64, grid_index: u32, trial: u32) -> Self {
        TrialRng::new(seed, (u64::from(grid_index) << 32) | u64::from(trial))
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform residue in `0..n` by rejection: words at or above the largest
    /// multiple of `n` that fits in 32 bits are redrawn.
    pub fn residue(&mut self, n: usize) -> usize {
        assert!(
            n > 0 && n <= u32::MAX as usize,
            "residue modulus out of range"
        );
        let n = n as u64;
        let zone = (1u64 << 32) - (1u64 << 32) % n;
        loop {
            let w = u64::from(self.next_u32());
            if w < zone {
                return (w % n) as usize;
            }
        }
    }

    /// `bits` independent fair bits packed into the low end of a word.
    #[inline]
    pub fn bits(&mut self, bits: usize) -> u32 {
        debug_assert!(bits <= 32);
        if bits == 32 {
            self.next_u32()
        } else {
            self.next_u32() & ((1u32 << bits) - 1)
        }
    }

    /// Uniform double in `[0, 1)` with 53 random bits.
    #[inline]
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }
}
