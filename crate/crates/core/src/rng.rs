//! Portable pseudo-random streams.
//!
//! Every random draw in this crate goes through [`Stream`], a thin wrapper over
//! xoshiro256++ seeded with SplitMix64 (the reference seeding procedure). The
//! conversions from raw 64-bit words are fixed here so that any
//! implementation of the same two generators reproduces the fixtures:
//!
//! * uniform on (0,1): `((w >> 11) + 0.5) * 2^-53`
//! * standard normal: Box-Muller, `sqrt(-2 ln u1) * cos(2π u2)`, two uniforms per draw
//! * index below `n`: `(w as u128 * n as u128) >> 64`
//! * child seeds: successive outputs of SplitMix64 seeded with the master seed

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::{SplitMix64, Xoshiro256PlusPlus};

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone)]
pub struct Stream {
    inner: Xoshiro256PlusPlus,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw strictly inside (0,1).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * TWO_POW_NEG_53
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn index(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Fisher-Yates shuffle, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.index(i + 1);
            items.swap(i, j);
        }
    }
}

/// The first `count` child seeds derived from `master`.
pub fn child_seeds(master: u64, count: usize) -> Vec<u64> {
    let mut sm = SplitMix64::seed_from_u64(master);
    (0..count).map(|_| sm.next_u64()).collect()
}
