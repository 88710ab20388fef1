//! Counter-based random streams.
//!
//! Every stream is addressed by `(seed, purpose tag, index)`; its `n`-th draw is
//! `splitmix64_mix(key + n * GOLDEN)`. Draws for different pixels or samples are
//! therefore independent of evaluation order, and parallel sampling gives the
//! same bits as sequential sampling.

use std::f64::consts::PI;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream purpose tags.
pub const TAG_PHOTON: u64 = 0x5048_4F54_4F4E_0001;
pub const TAG_PLAN_SHUFFLE: u64 = 0x504C_414E_5348_0002;
pub const TAG_SAMPLE_SEED: u64 = 0x5341_4D50_4C45_0003;

/// Means above this are drawn from the rounded normal approximation.
pub const POISSON_NORMAL_SWITCH: f64 = 30.0;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn stream_key(seed: u64, tag: u64, index: u64) -> u64 {
    let k = mix64(seed.wrapping_add(GOLDEN));
    let k = mix64(k ^ tag);
    mix64(k.wrapping_add(index.wrapping_mul(GOLDEN)))
}

/// FNV-1a, used to turn sample paths into stream indices.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, tag: u64, index: u64) -> Self {
        Self {
            key: stream_key(seed, tag, index),
            counter: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = mix64(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)));
        self.counter = self.counter.wrapping_add(1);
        out
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1]`.
    pub fn next_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n` by widening multiply.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    /// Box-Muller, one variate per two draws.
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.next_open01();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    }

    /// Poisson variate with mean `lambda`.
    ///
    /// Up to [`POISSON_NORMAL_SWITCH`] this counts unit-rate exponential
    /// arrivals until their sum exceeds `lambda`; above it, it rounds
    /// `lambda + sqrt(lambda) * Z` and clamps at zero.
    pub fn poisson(&mut self, lambda: f64) -> u64 {
        if lambda <= 0.0 {
            return 0;
        }
        if lambda <= POISSON_NORMAL_SWITCH {
            let mut elapsed = 0.0;
            let mut count = 0;
            loop {
                elapsed -= self.next_open01().ln();
                if elapsed > lambda {
                    return count;
                }
                count += 1;
            }
        }
        let draw = (lambda + lambda.sqrt() * self.standard_normal()).round();
        draw.max(0.0) as u64
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut r = CounterRng::new(7, TAG_PHOTON, 3);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = CounterRng::new(7, TAG_PHOTON, 3);
            (0..4).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        let mut other = CounterRng::new(7, TAG_PHOTON, 4);
        assert_ne!(a[0], other.next_u64());
        let mut other_tag = CounterRng::new(7, TAG_PLAN_SHUFFLE, 3);
        assert_ne!(a[0], other_tag.next_u64());
    }

    #[test]
    fn uniform_ranges() {
        let mut r = CounterRng::new(1, 2, 3);
        for _ in 0..10_000 {
            let u = r.next_f64();
            assert!((0.0..1.0).contains(&u));
            let v = r.next_open01();
            assert!(v > 0.0 && v <= 1.0);
            assert!(r.below(5) < 5);
        }
    }

    fn moments(lambda: f64, n: u64) -> (f64, f64) {
        let draws: Vec<f64> = (0..n)
            .map(|i| CounterRng::new(11, TAG_PHOTON, i).poisson(lambda) as f64)
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64;
        (mean, var)
    }

    #[test]
    fn poisson_counting_branch() {
        for lambda in [0.5, 4.0, 30.0] {
            let n = 100_000;
            let (mean, var) = moments(lambda, n);
            let se = (lambda / n as f64).sqrt();
            assert!((mean - lambda).abs() < 5.0 * se, "λ={lambda} mean={mean}");
            assert!((var / lambda - 1.0).abs() < 0.05, "λ={lambda} var={var}");
        }
    }

    #[test]
    fn poisson_normal_branch() {
        for lambda in [30.5, 50.0, 255.0] {
            let n = 100_000;
            let (mean, var) = moments(lambda, n);
            let se = (lambda / n as f64).sqrt();
            assert!((mean - lambda).abs() < 5.0 * se, "λ={lambda} mean={mean}");
            assert!((var / lambda - 1.0).abs() < 0.05, "λ={lambda} var={var}");
        }
    }

    #[test]
    fn poisson_zero_mean() {
        let mut r = CounterRng::new(0, 0, 0);
        assert_eq!(r.poisson(0.0), 0);
    }

    #[test]
    fn shuffle_is_permutation() {
        let mut v: Vec<usize> = (0..20).collect();
        CounterRng::new(7, TAG_PLAN_SHUFFLE, 0).shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort();
        assert_eq!(sorted, (0..20).collect::<Vec<_>>());
        assert_ne!(v, sorted);
    }
}
