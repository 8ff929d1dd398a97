//! Deterministic seed derivation and rank sampling.
//!
//! Every source of randomness in the crate bottoms out here. A campaign is
//! keyed by a single `master_seed`; trial `k` derives its own 64-bit seed
//! through [`trial_seed`] and draws ranks from a ChaCha8 stream, so trials
//! are independent of each other and of the execution schedule. The mix is
//! SplitMix64 over `master_seed + (k + 1) * GOLDEN_GAMMA`; it is fixed and
//! results depend only on `(master_seed, k)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::RankVector;

/// Weyl-sequence increment used by SplitMix64 (2^64 / phi, rounded odd).
const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: bijective mix of a 64-bit value.
pub fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial (or case) `index` of a campaign keyed by `master_seed`.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Deterministic RNG for one trial/case.
pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master_seed, index))
}

/// Draw `dim` uniform ranks in [0, 1) from `rng`.
pub fn draw_ranks(rng: &mut impl Rng, dim: usize) -> RankVector {
    RankVector::new((0..dim).map(|_| rng.gen::<f64>()).collect())
        .expect("uniform f64 draws lie in [0, 1)")
}

/// Ranks for trial `index` of a campaign: `dim` draws from [`trial_rng`].
pub fn trial_ranks(master_seed: u64, index: u64, dim: usize) -> RankVector {
    draw_ranks(&mut trial_rng(master_seed, index), dim)
}
