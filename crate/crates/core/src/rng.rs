//! Reproducible random streams.
//!
//! Replicate `k` of a campaign seeded with `master_seed` always draws from
//! ChaCha8 stream `k` of that seed, whichever thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn replicate_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
