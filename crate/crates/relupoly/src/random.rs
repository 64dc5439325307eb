//! Seeded randomness that stays in exact arithmetic: every draw is an integer over `2^16`.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::{Point, Rational};

pub type Rng64 = ChaCha8Rng;

pub const DENOMINATOR: i64 = 1 << 16;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform on the grid `lo + k/2^16` inside `[lo, hi]`.
pub fn rational_in(rng: &mut Rng64, lo: &Rational, hi: &Rational) -> Rational {
    let t: i64 = rng.gen_range(0..=DENOMINATOR);
    lo + (hi - lo) * Rational::new(BigInt::from(t), BigInt::from(DENOMINATOR))
}

/// Uniform on `[-1, 1]` with denominator `2^16`.
pub fn signed_unit(rng: &mut Rng64) -> Rational {
    let k: i64 = rng.gen_range(-DENOMINATOR..=DENOMINATOR);
    Rational::new(BigInt::from(k), BigInt::from(DENOMINATOR))
}

pub fn point_in_box(rng: &mut Rng64, lo: &[Rational], hi: &[Rational]) -> Point {
    lo.iter().zip(hi).map(|(a, b)| rational_in(rng, a, b)).collect()
}
