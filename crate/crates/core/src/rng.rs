//! Seeded RNG streams.
//!
//! Each concern (scenario layout, mobility, channel draws, policies) gets its
//! own ChaCha stream derived from one seed, so e.g. changing the policy never
//! perturbs the channel realisations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Scenario = 0,
    Mobility = 1,
    Channel = 2,
    Policy = 3,
}

pub fn stream(seed: u64, which: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(which as u64);
    rng
}
