//! Deterministic derivation of independent RNG seeds.

pub fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for the stream labelled by `path` under a master seed.
pub fn stream_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix(seed), |h, &v| splitmix(h ^ v))
}
