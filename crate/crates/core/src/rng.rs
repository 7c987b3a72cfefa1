//! Counter-based derivation of independent random streams.
//!
//! Every random draw in the crate comes from a stream keyed by a master seed
//! plus a small tuple of coordinates (round, fold, generation, slot, ...).
//! Streams never depend on evaluation order, which keeps results identical
//! for any worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a path of coordinates into a child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &c| {
        splitmix64(acc ^ splitmix64(c))
    })
}

pub fn stream(master: u64, path: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}

/// Domain tags that keep streams for different purposes apart.
pub(crate) mod tag {
    pub const FOLD_PLAN: u64 = 0x464f_4c44;
    pub const TRAIN: u64 = 0x5452_4149;
    pub const GA: u64 = 0x4741_0000;
    pub const GA_INIT: u64 = 0x4741_4949;
    pub const GA_BREED: u64 = 0x4741_4252;
    pub const SYNTH: u64 = 0x5359_4e54;
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = stream(7, &[1, 2]).random_iter().take(4).collect();
        let b: Vec<u64> = stream(7, &[1, 2]).random_iter().take(4).collect();
        let c: Vec<u64> = stream(7, &[2, 1]).random_iter().take(4).collect();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(derive_seed(7, &[]), derive_seed(8, &[]));
    }
}
