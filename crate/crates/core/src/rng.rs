//! Seeded generator shared by every stochastic routine.

use rand::SeedableRng;

/// ChaCha8 keyed from a 64-bit seed. Stable across platforms.
pub type Rng = rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
