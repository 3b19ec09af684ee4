//! Seed handling. Every random choice in the crate flows from an explicit
//! `u64` seed through these helpers, so results never depend on iteration
//! order or thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based value keyed on `(seed, index)`.
#[inline]
pub fn keyed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed) ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

/// Seed for the `stream`-th independent sub-computation of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    keyed(seed ^ 0x5851_f42d_4c95_7f2d, stream)
}

pub fn rng_from(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Maps 64 random bits onto `[0, 1)` with 53-bit precision.
#[inline]
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keyed_is_a_pure_function() {
        assert_eq!(keyed(7, 3), keyed(7, 3));
        assert_ne!(keyed(7, 3), keyed(7, 4));
        assert_ne!(keyed(7, 3), keyed(8, 3));
    }

    #[test]
    fn unit_range() {
        assert_eq!(unit_f64(0), 0.0);
        assert!(unit_f64(u64::MAX) < 1.0);
    }
}
