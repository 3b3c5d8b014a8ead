use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sample::Sample;

/// Random stream `stream` of the generator seeded by `seed`. Distinct
/// streams of one seed are independent.
pub fn replicate_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes a salt into a seed (SplitMix64 finaliser).
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `n` subject indices drawn uniformly with replacement.
pub fn resample_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Draws `n` whole subjects with replacement.
pub fn resample<R: Rng + ?Sized>(sample: &Sample, rng: &mut R) -> Sample {
    let idx = resample_indices(sample.n(), rng);
    let subjects = idx.iter().map(|&i| sample.subjects()[i].clone()).collect();
    Sample::from_parts(subjects, sample.num_causes())
}
