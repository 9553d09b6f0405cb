//! Splittable random streams.
//!
//! Every random draw in a simulation comes from a ChaCha8 generator keyed by
//! the global seed and a short tuple identifying its purpose (channel draw,
//! noise for a given SNR point, ...). Work items can therefore run in any
//! order or on any thread and still see the same numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::C64;

/// Stream tags.
pub mod tag {
    pub const CHANNEL: u64 = 0x4348_414e;
    /// Noise for the MI estimators; Bob and Mallory share it.
    pub const MI: u64 = 0x4d49_5f42;
    pub const BER: u64 = 0x4245_5200;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, key)`.
pub fn stream(seed: u64, key: &[u64]) -> ChaCha8Rng {
    let id = key
        .iter()
        .fold(0x5353_4d5f_4644_4d00_u64, |acc, &k| splitmix64(acc ^ k));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// One draw from `CN(0, variance)`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = libm::sqrt(variance / 2.0);
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}
