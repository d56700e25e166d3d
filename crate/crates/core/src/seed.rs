//! Seed derivation so that independent random streams (placement, keys,
//! protocol nonces) never share a generator state.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed for the named stream.
pub fn derive(seed: u64, stream: &str) -> u64 {
    stream
        .bytes()
        .fold(mix(seed), |acc, b| mix(acc ^ u64::from(b)))
}

pub fn rng(seed: u64, stream: &str) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(derive(seed, stream))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ() {
        assert_ne!(derive(1, "placement"), derive(1, "keys"));
        assert_ne!(derive(1, "keys"), derive(2, "keys"));
        assert_eq!(derive(7, "keys"), derive(7, "keys"));
    }
}
