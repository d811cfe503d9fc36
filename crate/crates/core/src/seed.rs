//! Stable seed derivation.
//!
//! Seeds must not depend on the standard library's hasher, whose output is
//! allowed to change between releases, so derived seeds go through a fixed
//! SplitMix64 finaliser.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one seed. Order matters.
pub fn combine(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x6a09_e667_f3bc_c908, |acc, &w| mix64(acc ^ mix64(w)))
}

/// Seed of one ensemble sample: `hash(global, dim, density, index)`.
pub fn sample_seed(global: u64, dim: usize, density: f64, index: usize) -> u64 {
    combine(&[global, dim as u64, density.to_bits(), index as u64])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_seeds_are_stable() {
        // Frozen: changing these silently changes every derived ensemble.
        assert_eq!(mix64(0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(sample_seed(1, 100, 1.0, 0), sample_seed(1, 100, 1.0, 0));
        assert_ne!(sample_seed(1, 100, 1.0, 0), sample_seed(1, 100, 1.0, 1));
        assert_ne!(sample_seed(1, 100, 1.0, 0), sample_seed(1, 101, 1.0, 0));
        assert_ne!(sample_seed(1, 100, 1.0, 0), sample_seed(1, 100, 0.5, 0));
    }
}
