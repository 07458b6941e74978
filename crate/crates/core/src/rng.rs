//! Seeded random streams. Every stream is ChaCha8 keyed by three 64-bit
//! words (master seed, then two indices) in little-endian order, followed by
//! eight zero bytes, so results are reproducible from the numbers alone.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::Permutation;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64, a: u64, b: u64) -> Stream {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&a.to_le_bytes());
    key[16..24].copy_from_slice(&b.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Uniform integer in `0..bound` by rejection, so no value is favored.
pub fn below(rng: &mut Stream, bound: usize) -> usize {
    assert!(bound > 0, "empty range");
    let bound = bound as u64;
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return (x % bound) as usize;
        }
    }
}

/// Uniform permutation of `0..n` by Fisher-Yates.
pub fn random_permutation(n: usize, rng: &mut Stream) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = below(rng, i + 1);
        images.swap(i, j);
    }
    Permutation::new(images).expect("shuffle of the identity")
}
