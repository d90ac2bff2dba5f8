//! Seeded random source shared by every stochastic stage.
//!
//! The generator is xoshiro256** (Blackman & Vigna), state words updated with
//! shifts 17 and rotation 45, output `rotl(s1 * 5, 7) * 9`. The 256-bit state
//! is expanded from a 64-bit seed with SplitMix64 (increment
//! `0x9e3779b97f4a7c15`, multipliers `0xbf58476d1ce4e5b9` and
//! `0x94d049bb133111eb`). Derived draws are defined here rather than through
//! a distribution crate so the stream can be reproduced in other languages:
//!
//! * `uniform()` is `(next_u64() >> 11) * 2^-53`, in `[0, 1)`;
//! * `index(n)` is `floor(uniform() * n)`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

#[derive(Debug, Clone)]
pub struct SeededRng(Xoshiro256StarStar);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`. `n` must be non-zero.
    #[inline]
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        let i = (self.uniform() * n as f64) as usize;
        i.min(n - 1)
    }

    /// Standard exponential variate, `-ln(1 - u)`.
    pub fn exponential(&mut self) -> f64 {
        -(1.0 - self.uniform()).ln()
    }

    /// Standard normal variate by Box-Muller (cosine branch only).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}
