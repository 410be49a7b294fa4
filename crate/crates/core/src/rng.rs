//! Deterministic random-stream derivation.
//!
//! Every randomized operation in this crate draws from a ChaCha8 stream whose
//! seed is derived from a caller seed and one or more stream indices through
//! `mix64`, a splitmix64-based 64-bit mixer. Identical `(seed, indices)`
//! always yield identical draws on every platform, and independent indices
//! yield independent streams, so work can be scheduled across threads without
//! affecting results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The splitmix64 finalizer: the 64-bit mixing function used everywhere a
/// stream seed is derived from `(seed, index)` pairs.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a seed with one stream index.
pub fn mix64(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// Stream for `(seed, index)`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(seed, index))
}

/// Stream for `(seed, a, b)`.
pub fn stream2(seed: u64, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix64(mix64(seed, a), b))
}

/// Stream seeded directly, for operations keyed by a bare seed.
pub fn root_stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fisher-Yates shuffle driven by `u64` draws so the result does not depend
/// on the platform word size.
pub fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i as u64) as usize;
        items.swap(i, j);
    }
}

/// Uniform sample of `k` distinct values from `0..n` (partial Fisher-Yates).
pub fn sample_without_replacement(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + rng.gen_range(0..(n - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

/// Standard normal draw via Box-Muller; consumes exactly two uniforms.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // u1 in (0,1] keeps ln finite.
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix64_separates_indices() {
        assert_ne!(mix64(7, 0), mix64(7, 1));
        assert_ne!(mix64(7, 0), mix64(8, 0));
        assert_eq!(mix64(7, 3), mix64(7, 3));
    }

    #[test]
    fn shuffle_is_deterministic_and_a_permutation() {
        let mut a: Vec<u32> = (0..50).collect();
        let mut b: Vec<u32> = (0..50).collect();
        shuffle(&mut a, &mut root_stream(42));
        shuffle(&mut b, &mut root_stream(42));
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<_>>());
    }

    #[test]
    fn sampling_without_replacement_yields_distinct() {
        let mut rng = root_stream(9);
        let s = sample_without_replacement(9, 3, &mut rng);
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|&i| i < 9));
        let mut d = s.clone();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn standard_normal_moments_are_sane() {
        let mut rng = root_stream(1);
        let n = 20_000;
        let draws: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.03, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }
}
