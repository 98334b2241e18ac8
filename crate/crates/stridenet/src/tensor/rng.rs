//! Seeded random source; identical seeds give bit-identical streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Deterministic random number generator. Everything stochastic in the
/// pipeline (initialization, dropout masks, batch sampling, fold shuffling,
/// synthetic data) draws from one of these; wall-clock seeding is not
/// supported anywhere.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// The seed this generator was constructed from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// A generator with a seed derived from this one's construction seed and
    /// a stream label. Used to give folds and subsystems independent,
    /// reproducible streams without sharing state.
    pub fn derive(&self, stream: u64) -> SeededRng {
        SeededRng::new(splitmix64(
            self.seed ^ (stream.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        ))
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in [0, n).
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.gen_range(0..n)
    }

    /// Normal with mean 0 and the given standard deviation.
    pub fn normal(&mut self, stddev: f64) -> f64 {
        let z: f64 = self.inner.sample(StandardNormal);
        z * stddev
    }

    /// Normal with mean 0 and standard deviation `stddev`, redrawing any
    /// sample outside `±2 * stddev`.
    pub fn truncated_normal(&mut self, stddev: f64) -> f64 {
        assert!(stddev > 0.0, "stddev must be positive");
        let bound = 2.0 * stddev;
        loop {
            let z = self.normal(stddev);
            if z.abs() <= bound {
                return z;
            }
        }
    }

    /// Fills a fresh buffer with truncated-normal samples.
    pub fn truncated_normal_vec(&mut self, n: usize, stddev: f64) -> Vec<f64> {
        (0..n).map(|_| self.truncated_normal(stddev)).collect()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, values: &mut [T]) {
        for i in (1..values.len()).rev() {
            let j = self.inner.gen_range(0..=i);
            values.swap(i, j);
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}
