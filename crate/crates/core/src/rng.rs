//! Seed derivation.
//!
//! Every random quantity in a simulation is drawn from its own ChaCha stream
//! keyed by `(master_seed, index, role)`. Work units can therefore be run in
//! any order, on any number of threads, and still see the same numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a derived stream is used for. Distinct roles never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum StreamRole {
    Noise = 1,
    Data = 2,
    Phase = 3,
    Channel = 4,
    Oracle = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of indices into a 64-bit stream seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Stream for `(master, indices.., role)`.
pub fn stream(master: u64, indices: &[u64], role: StreamRole) -> ChaCha8Rng {
    let mut path = indices.to_vec();
    path.push(role as u64);
    ChaCha8Rng::seed_from_u64(derive_seed(master, &path))
}

/// Plain stream from a single seed.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
