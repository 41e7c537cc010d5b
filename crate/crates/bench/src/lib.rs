//! Shared inputs for the criterion benchmarks.

use chaoshash::BitString;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A reproducible random message of `len` bits.
pub fn message(len: usize, seed: u64) -> BitString {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BitString::from_iter((0..len).map(|_| rng.gen::<bool>()))
}
