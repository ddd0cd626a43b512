//! SplitMix64, the seeded generator behind every randomized corpus.
//!
//! The recurrence and output mix are fixed so a seed reproduces the same
//! stream in any implementation:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! return z ^ (z >> 31)
//! ```
//!
//! Bounded draws use `next_u64() % span`; the modulo bias is irrelevant
//! here and keeps the mapping trivially portable.

use crate::scalar::Scalar;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
pub const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
pub const MIX_2: u64 = 0x94D0_49BB_1331_11EB;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
        z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        self.next_u64() % bound
    }

    /// Uniform in the inclusive range `lo..=hi`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        let span = (hi - lo) as u64 + 1;
        lo + self.below(span) as i64
    }

    pub fn range_usize(&mut self, lo: usize, hi: usize) -> usize {
        self.range_i64(lo as i64, hi as i64) as usize
    }

    /// `true` with probability `num/den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    /// A small rational `p/q` with `|p| <= max_num`, `1 <= q <= max_den`.
    pub fn small_rational(&mut self, max_num: i64, max_den: i64) -> Scalar {
        let p = self.range_i64(-max_num, max_num);
        let q = self.range_i64(1, max_den);
        Scalar::frac(p, q)
    }

    /// A nonzero small rational.
    pub fn nonzero_rational(&mut self, max_num: i64, max_den: i64) -> Scalar {
        loop {
            let v = self.small_rational(max_num, max_den);
            if !v.is_zero() {
                return v;
            }
        }
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Derives an independent stream, e.g. one per scenario.
    pub fn fork(&mut self) -> SplitMix64 {
        SplitMix64::new(self.next_u64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_stream() {
        // Published SplitMix64 outputs for seed 0.
        let mut g = SplitMix64::new(0);
        assert_eq!(g.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(g.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(g.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn ranges_are_inclusive() {
        let mut g = SplitMix64::new(7);
        let draws: Vec<i64> = (0..200).map(|_| g.range_i64(-2, 2)).collect();
        assert!(draws.iter().all(|v| (-2..=2).contains(v)));
        assert!(draws.contains(&-2) && draws.contains(&2));
    }
}
