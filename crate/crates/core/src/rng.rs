//! Seeded generator shared by every randomized routine.
//!
//! SplitMix64 with the raw seed as initial state; `seeded(0).next_u64()` is
//! `0xe220a8397b1dcdaf`.

use rand::SeedableRng;
pub use rand_xoshiro::SplitMix64 as Rng64;

pub fn seeded(seed: u64) -> Rng64 {
    Rng64::seed_from_u64(seed)
}
