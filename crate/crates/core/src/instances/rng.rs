use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

use crate::queue::{Instance, Policy};

/// Portable seeded generator: xoshiro256** whose 256-bit state is expanded
/// from the 64-bit seed with SplitMix64. Bounded integers use rejection
/// sampling on the raw 64-bit output (no modulo bias), so the stream depends
/// only on these two published algorithms.
#[derive(Debug, Clone)]
pub struct SeededRng(Xoshiro256StarStar);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn uniform(&mut self, lo: u64, hi: u64) -> u64 {
        assert!(lo <= hi, "empty range [{lo}, {hi}]");
        let span = hi - lo;
        if span == u64::MAX {
            return self.next_u64();
        }
        let range = span + 1;
        // largest multiple of `range` that fits, as an exclusive bound
        let zone = u64::MAX - (u64::MAX - range + 1) % range;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return lo + x % range;
            }
        }
    }

    /// Uniform real in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A uniformly random policy of `inst` (Floyd's sampling of `N` points
    /// out of `{0, .., S-1}`).
    pub fn policy(&mut self, inst: &Instance) -> Policy {
        let (s, n) = (inst.capacity() as u64, inst.workers() as u64);
        let mut chosen = std::collections::BTreeSet::new();
        for j in s - n..s {
            let t = self.uniform(0, j);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        let mut points: Vec<usize> = chosen.into_iter().map(|v| v as usize).collect();
        points.push(inst.capacity());
        Policy::from_points_unchecked(inst, points)
    }
}
