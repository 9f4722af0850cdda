//! Self-contained deterministic random number generation.
//!
//! Xoshiro256++ state seeded through SplitMix64, with uniform, bounded,
//! Gaussian (Box-Muller), and discrete-pmf draws layered on top. Every
//! seeded report in this workspace names this generator; identical seeds
//! give bit-identical streams on every platform.

use alloc::vec::Vec;

/// Xoshiro256++ generator.
#[derive(Debug, Clone)]
pub struct Rng {
    state: [u64; 4],
    /// Cached second output of the last Box-Muller pair.
    gauss_spare: Option<f64>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let state = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Rng {
            state,
            gauss_spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)` via widening multiply.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Standard Gaussian via Box-Muller.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.gauss_spare.take() {
            return z;
        }
        let mut u1 = self.f64();
        while u1 <= 0.0 {
            u1 = self.f64();
        }
        let u2 = self.f64();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        self.gauss_spare = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }

    /// Draws an index from a probability table by cdf inversion; the table
    /// must have positive total mass.
    pub fn discrete(&mut self, pmf: &[f64]) -> usize {
        let total: f64 = pmf.iter().sum();
        let target = self.f64() * total;
        let mut acc = 0.0;
        for (i, &p) in pmf.iter().enumerate() {
            acc += p;
            if target < acc {
                return i;
            }
        }
        // Rounding pushed the target past the last positive cell.
        pmf.iter().rposition(|&p| p > 0.0).unwrap_or(pmf.len() - 1)
    }

    /// A uniformly random point on the probability simplex of dimension
    /// `n` (normalized unit-rate exponentials).
    pub fn simplex_point(&mut self, n: usize) -> Vec<f64> {
        let mut v: Vec<f64> = (0..n)
            .map(|_| {
                let mut u = self.f64();
                while u <= 0.0 {
                    u = self.f64();
                }
                -libm::log(u)
            })
            .collect();
        let total: f64 = v.iter().sum();
        for x in &mut v {
            *x /= total;
        }
        v
    }

    /// A random direction on the nonnegative unit sphere: absolute Gaussian
    /// coordinates, L2-normalized.
    pub fn nonneg_direction(&mut self, n: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..n).map(|_| self.gaussian().abs()).collect();
            let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
            if norm > 1e-12 {
                return v.iter().map(|x| x / norm).collect();
            }
        }
    }
}
