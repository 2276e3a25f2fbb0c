//! Seeded, reproducible sample generation.
//!
//! All samples are drawn up front from a ChaCha stream so that results do
//! not depend on how later work is split across threads.

use num::{BigInt, BigRational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Denominator exponent of every sampled coordinate.
pub const DYADIC_BITS: u32 = 20;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dyadic(n: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(1i64 << DYADIC_BITS))
}

/// Integer numerators of dyadic points uniform in the closed unit 4-ball.
pub fn ball_numerators(seed: u64, count: usize) -> Vec<[i64; 4]> {
    let mut r = rng(seed);
    let scale = 1i64 << DYADIC_BITS;
    let bound = (scale as i128) * (scale as i128);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n: [i64; 4] = std::array::from_fn(|_| r.gen_range(-scale..=scale));
        let norm: i128 = n.iter().map(|&v| (v as i128) * (v as i128)).sum();
        if norm <= bound {
            out.push(n);
        }
    }
    out
}

/// Dyadic rational points in the closed unit 4-ball.
pub fn ball_points(seed: u64, count: usize) -> Vec<[BigRational; 4]> {
    ball_numerators(seed, count)
        .into_iter()
        .map(|n| n.map(dyadic))
        .collect()
}

/// Dyadic rationals uniform in [lo, hi] (given as integers over 2^bits).
pub fn dyadic_in(seed: u64, count: usize, lo: f64, hi: f64) -> Vec<BigRational> {
    let mut r = rng(seed);
    let scale = (1i64 << DYADIC_BITS) as f64;
    let a = (lo * scale).ceil() as i64;
    let b = (hi * scale).floor() as i64;
    (0..count).map(|_| dyadic(r.gen_range(a..=b))).collect()
}

pub fn to_f64(p: &[BigRational; 4]) -> [f64; 4] {
    std::array::from_fn(|i| crate::symcalc::rat_to_f64(&p[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{One, Zero};

    #[test]
    fn points_lie_in_ball_and_repeat() {
        let a = ball_points(7, 200);
        assert_eq!(a, ball_points(7, 200));
        assert_ne!(a, ball_points(8, 200));
        for p in &a {
            let n: BigRational = p
                .iter()
                .map(|q| q * q)
                .fold(BigRational::zero(), |x, y| x + y);
            assert!(n <= BigRational::one());
        }
    }
}
