//! Deterministic, stream-splittable random sampling.
//!
//! Every experiment in this crate drives its randomness through [`Rng`], a
//! counter-based generator addressed by `(seed, stream_id)`. Streams with the
//! same seed and different stream ids are statistically independent, so a
//! simulation can hand out one stream per subsystem (channel draws, noise,
//! hashing seeds, ...) and stay reproducible no matter how the call order
//! between subsystems changes.
//!
//! Gaussian variates come from the Box-Muller transform applied to the uniform
//! stream; circularly symmetric complex Gaussians split the variance evenly
//! between the quadratures.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

const TWO_POW_NEG53: f64 = 1.0 / (1u64 << 53) as f64;

/// Seeded, stream-addressable random number generator.
#[derive(Debug, Clone)]
pub struct Rng {
    chacha: ChaCha12Rng,
    seed: u64,
    stream_id: u64,
}

impl Rng {
    /// Generator for `(seed, stream_id)`. Identical pairs yield identical
    /// sequences; distinct `stream_id`s under one seed yield independent ones.
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut chacha = ChaCha12Rng::seed_from_u64(seed);
        chacha.set_stream(stream_id);
        Rng {
            chacha,
            seed,
            stream_id,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Fresh generator on the same seed but a different stream.
    pub fn substream(&self, stream_id: u64) -> Self {
        Rng::new(self.seed, stream_id)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.chacha.next_u64()
    }

    pub fn fill_bytes(&mut self, out: &mut [u8]) {
        self.chacha.fill_bytes(out);
    }

    /// Uniform on `[0, 1)` with 53-bit resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_NEG53
    }

    /// Uniform on `(0, 1]`; safe as a logarithm argument.
    fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * TWO_POW_NEG53
    }

    /// Uniform integer in `[0, bound)`.
    ///
    /// # Panics
    /// Panics if `bound` is zero.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "below() requires a positive bound");
        // Widening-multiply rejection sampling: unbiased for any bound.
        let bound = bound as u64;
        let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
        loop {
            let raw = self.next_u64();
            let (hi, lo) = {
                let wide = (raw as u128) * (bound as u128);
                ((wide >> 64) as u64, wide as u64)
            };
            if lo <= zone || raw <= zone {
                // `lo` rejection guards the biased tail; `raw <= zone` keeps
                // the common case branch-cheap when bound divides 2^64.
                return hi as usize;
            }
        }
    }

    /// One Box-Muller pair of independent standard normals.
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.uniform_open();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// Single standard normal (the pair's second half is discarded so that the
    /// consumed stream length is a pure function of the call sequence).
    pub fn standard_normal(&mut self) -> f64 {
        self.normal_pair().0
    }

    /// Real Gaussian with mean zero and the given standard deviation.
    pub fn normal(&mut self, std_dev: f64) -> f64 {
        debug_assert!(std_dev >= 0.0 && std_dev.is_finite());
        std_dev * self.standard_normal()
    }

    /// Exponential variate with the given mean (inverse-CDF sampling).
    pub fn exponential(&mut self, mean: f64) -> f64 {
        debug_assert!(mean >= 0.0 && mean.is_finite());
        -mean * self.uniform_open().ln()
    }

    /// Circularly symmetric complex Gaussian with `E[|z|^2] = variance`.
    pub fn complex_gaussian(&mut self, variance: f64) -> Complex64 {
        debug_assert!(variance >= 0.0 && variance.is_finite());
        let scale = (variance / 2.0).sqrt();
        let (re, im) = self.normal_pair();
        Complex64::new(scale * re, scale * im)
    }
}
