//! Deterministic seeded randomness.
//!
//! Every randomized routine takes a `u64` seed (or a [`DetRng`] derived from
//! one) so that identical inputs reproduce identical outputs. Sub-streams are
//! derived with [`derive_seed`], never by sharing a generator across
//! independent units of work.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub type DetRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> DetRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Mixes a seed with a tag sequence (splitmix64 steps) to derive the seed of
/// an independent sub-stream, e.g. per `(level, block)` or per trial.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut state = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &tag in tags {
        state = state.wrapping_add(splitmix(tag));
        state = splitmix(state);
    }
    state
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform value in `0..bound` (rejection sampling; `bound > 0`).
pub fn below(rng: &mut DetRng, bound: usize) -> usize {
    debug_assert!(bound > 0);
    let bound = bound as u64;
    let zone = u64::MAX - (u64::MAX % bound);
    loop {
        let raw = rng.next_u64();
        if raw < zone {
            return (raw % bound) as usize;
        }
    }
}

pub fn shuffle<T>(rng: &mut DetRng, items: &mut [T]) {
    for i in (1..items.len()).rev() {
        let j = below(rng, i + 1);
        items.swap(i, j);
    }
}

/// `k` distinct values sampled from `0..n`, in random order.
pub fn sample_distinct(rng: &mut DetRng, n: usize, k: usize) -> alloc::vec::Vec<usize> {
    debug_assert!(k <= n);
    // Partial Fisher-Yates over an index table.
    let mut idx: alloc::vec::Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = i + below(rng, n - i);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

/// Picks a uniformly random element of a non-empty slice.
pub fn pick<'a, T>(rng: &mut DetRng, items: &'a [T]) -> &'a T {
    &items[below(rng, items.len())]
}
