//! Deterministic random streams.
//!
//! Every stochastic operation in the crate draws from one generator type:
//! xoshiro256++ whose 256-bit state is filled by four successive SplitMix64
//! outputs of the 64-bit seed. Bounded integers are produced by [`below`],
//! Lemire's multiply-and-reject reduction over `next_u64`, so a stream can be
//! reproduced in any language from the seed alone.
//!
//! Reference vectors (seed 0): `0x53175d61490b23df`, `0x61da6f3dc380d507`,
//! `0x5c0fdf91ec9a7bfc`, `0x02eebf8c3bbe5e1a`.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Rng = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> Rng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Uniform draw from `0..n`. `n` must be nonzero.
#[inline]
pub fn below<R: RngCore + ?Sized>(rng: &mut R, n: u32) -> u32 {
    debug_assert!(n > 0);
    let n = n as u64;
    let mut m = (rng.next_u64() as u128) * (n as u128);
    if (m as u64) < n {
        let threshold = n.wrapping_neg() % n;
        while (m as u64) < threshold {
            m = (rng.next_u64() as u128) * (n as u128);
        }
    }
    (m >> 64) as u32
}
