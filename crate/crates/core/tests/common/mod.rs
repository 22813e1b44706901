#![allow(dead_code)]

use qpi_core::Rational;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random `p/r` in `[lo, hi]` with `r <= max_den`, strictly inside (0, 1).
pub fn unit_rational(rng: &mut ChaCha8Rng, max_den: i64, lo: f64, hi: f64) -> Rational {
    loop {
        let r = rng.gen_range(2..=max_den);
        let p = rng.gen_range(1..r);
        let v = p as f64 / r as f64;
        if v >= lo && v <= hi {
            return Rational::from((p, r));
        }
    }
}

pub fn unit_vec(rng: &mut ChaCha8Rng, n: usize, max_den: i64) -> Vec<Rational> {
    (0..n).map(|_| unit_rational(rng, max_den, 0.0, 1.0)).collect()
}
