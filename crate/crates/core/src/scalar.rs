//! Scalar abstraction for the real-valued knobs (ε, λ, η, γ, α).
//!
//! Every graph quantity is an integer count; the only non-integral values are
//! algorithm parameters and the thresholds built from them. Threshold tests are
//! written against [`Scalar`] so they can run in floating point or in exact
//! rational arithmetic.

use std::fmt::{Debug, Display};

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// Numeric type usable for algorithm parameters and threshold comparisons.
pub trait Scalar:
    Num + Copy + PartialOrd + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Exact conversion of a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Approximate conversion from a float literal (CLI input, test tables).
    fn from_real(x: f64) -> Self;

    fn floor_count(self) -> usize;

    fn ceil_count(self) -> usize;

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar representable as f64")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn powi(self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| acc * self)
    }
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn floor_count(self) -> usize {
        self.floor().max(0.0) as usize
    }
    fn ceil_count(self) -> usize {
        self.ceil().max(0.0) as usize
    }
}

impl Scalar for f32 {
    fn from_real(x: f64) -> Self {
        x as f32
    }
    fn floor_count(self) -> usize {
        self.floor().max(0.0) as usize
    }
    fn ceil_count(self) -> usize {
        self.ceil().max(0.0) as usize
    }
}

impl Scalar for Ratio<i64> {
    fn from_real(x: f64) -> Self {
        Ratio::approximate_float(x).expect("finite parameter")
    }
    fn floor_count(self) -> usize {
        let f = self.floor().to_integer();
        f.max(0) as usize
    }
    fn ceil_count(self) -> usize {
        let c = self.ceil().to_integer();
        c.max(0) as usize
    }
}

/// Smallest integer `x >= 1` with `x^k >= m` (exact integer k-th root, rounded up).
pub fn ceil_root(m: u64, k: u32) -> u64 {
    if m <= 1 || k == 0 {
        return 1;
    }
    if k == 1 {
        return m;
    }
    let mut x = (m as f64).powf(1.0 / k as f64).round().max(1.0) as u64;
    while pow_at_least(x, k, m) && x > 1 && pow_at_least(x - 1, k, m) {
        x -= 1;
    }
    while !pow_at_least(x, k, m) {
        x += 1;
    }
    x
}

/// `x^k >= m` without overflow.
pub fn pow_at_least(x: u64, k: u32, m: u64) -> bool {
    let mut acc: u128 = 1;
    for _ in 0..k {
        acc *= x as u128;
        if acc >= m as u128 {
            return true;
        }
    }
    acc >= m as u128
}

/// `⌈log2 x⌉` for `x >= 1`, and 0 for `x <= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceil_root_matches_brute_force() {
        for m in 0..2000u64 {
            for k in 1..6u32 {
                let brute = (1..).find(|&x: &u64| x.pow(k) >= m).unwrap();
                assert_eq!(ceil_root(m, k), brute, "m={m} k={k}");
            }
        }
    }

    #[test]
    fn ceil_log2_small_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(1024), 10);
        assert_eq!(ceil_log2(1025), 11);
    }

    #[test]
    fn rational_rounding_is_exact() {
        let third = Ratio::new(1i64, 3);
        assert_eq!((Ratio::one() / third).ceil_count(), 3);
        assert_eq!(Ratio::new(5i64, 2).floor_count(), 2);
        assert_eq!(Ratio::new(5i64, 2).ceil_count(), 3);
        assert_eq!(<Ratio<i64> as Scalar>::from_real(0.25), Ratio::new(1, 4));
    }

    use num_traits::One;
}
