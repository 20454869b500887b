//! Seeded, portable random number generation.
//!
//! Every random draw in the toolkit goes through [`SeededRng`], a thin wrapper
//! over xoshiro256++ seeded through SplitMix64 (the `rand_xoshiro`
//! `seed_from_u64` construction). The derived draws are defined here rather
//! than borrowed from `rand` distributions so that the exact sequence is
//! documented and reproducible from any language:
//!
//! - `next_f64`: `(next_u64() >> 11) * 2^-53`, uniform on `[0, 1)`.
//! - `below(n)`: `(next_u64() as u128 * n as u128) >> 64`, multiply-shift
//!   reduction onto `0..n`.
//! - `shuffle`: Fisher-Yates from the last index down, using `below(i + 1)`.
//! - `gaussian`: Box-Muller on two `next_f64` draws, cosine branch only.
//!
//! Independent streams are derived from one user seed by XOR-ing a fixed
//! per-purpose constant into the seed before seeding.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Stream constant for stratified split shuffling.
pub const SPLIT_STREAM: u64 = 0x0000_0000_0000_0000;
/// Stream constant for SMOTE neighbor selection.
pub const NEIGHBOR_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;
/// Stream constant for SMOTE interpolation gaps.
pub const GAP_STREAM: u64 = 0xD1B5_4A32_D192_ED03;
/// Stream constant for decision-tree feature subsampling.
pub const TREE_STREAM: u64 = 0x94D0_49BB_1331_11EB;
/// Stream constant for the 2-D scatter projection.
pub const PROJECTION_STREAM: u64 = 0xBF58_476D_1CE4_E5B9;
/// Stream constant for synthetic corpus generation.
pub const FIXTURE_STREAM: u64 = 0x2545_F491_4F6C_DD1D;

#[derive(Debug, Clone)]
pub struct SeededRng(Xoshiro256PlusPlus);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(Xoshiro256PlusPlus::seed_from_u64(seed))
    }

    /// Generator for one named purpose, independent of the other streams
    /// derived from the same seed.
    pub fn stream(seed: u64, stream: u64) -> Self {
        Self::new(seed ^ stream)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in `0..n`. Panics if `n == 0`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0) has no valid output");
        ((self.next_u64() as u128 * n as u128) >> 64) as usize
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }

    /// Standard normal draw.
    pub fn gaussian(&mut self) -> f64 {
        // 1 - u keeps the log argument in (0, 1].
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
