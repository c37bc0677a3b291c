//! Fixed-point phases on the circle.
//!
//! A [`Turn`] stores an element of ℝ/ℤ as a 128-bit binary fraction, so
//! `n·α mod 1` is an exact wrapping multiplication and polynomial phases
//! can be accumulated without drift.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::ops::{Add, Neg, Sub};

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

/// An angle measured in full turns, reduced mod 1, with resolution 2⁻¹²⁸.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Turn(pub u128);

impl Turn {
    pub const ZERO: Turn = Turn(0);
    pub const HALF: Turn = Turn(1 << 127);

    /// (√5 − 1)/2, truncated to 128 bits.
    pub const GOLDEN: Turn = Turn(0x9e37_79b9_7f4a_7c15_f39c_c060_5ced_c834);
    /// √2 − 1, truncated to 128 bits.
    pub const SQRT2_FRAC: Turn = Turn(0x6a09_e667_f3bc_c908_b2fb_1366_ea95_7d3e);

    /// Exact conversion of a double (reduced mod 1).
    pub fn from_f64(x: f64) -> Turn {
        let f = x - x.floor();
        // `f` has at most 53 significant bits, so both halves are exact.
        let hi_scaled = f * TWO_POW_64;
        let hi = hi_scaled.floor();
        let lo = ((hi_scaled - hi) * TWO_POW_64).floor();
        let hi = if hi >= TWO_POW_64 { 0u128 } else { hi as u128 };
        Turn((hi << 64) | (lo as u64 as u128))
    }

    /// `num/den` turns, rounded down.
    pub fn from_ratio(num: u64, den: u64) -> Turn {
        assert!(den > 0, "zero denominator");
        let num = num % den;
        // long division of num·2^128 by den, 64 bits at a time
        let den = den as u128;
        let hi = ((num as u128) << 64) / den;
        let rem = ((num as u128) << 64) % den;
        let lo = (rem << 64) / den;
        Turn((hi << 64) | lo)
    }

    /// Argument of a nonzero complex number, in turns.
    pub fn from_arg(z: Complex64) -> Turn {
        Turn::from_f64(z.im.atan2(z.re) / TAU)
    }

    /// Value in `[0, 1)`.
    pub fn to_f64(self) -> f64 {
        let hi = (self.0 >> 64) as u64 as f64;
        let lo = self.0 as u64 as f64;
        (hi + lo / TWO_POW_64) / TWO_POW_64
    }

    /// Representative in `[-1/2, 1/2)`.
    pub fn to_signed_f64(self) -> f64 {
        (self.0 as i128) as f64 / (TWO_POW_64 * TWO_POW_64)
    }

    /// e^{2πi·self}.
    #[inline]
    pub fn unit(self) -> Complex64 {
        let (s, c) = (self.to_signed_f64() * TAU).sin_cos();
        Complex64::new(c, s)
    }

    #[inline]
    pub fn mul_int(self, n: i128) -> Turn {
        Turn(self.0.wrapping_mul(n as u128))
    }

    #[inline]
    pub fn mul_wrapping(self, n: u128) -> Turn {
        Turn(self.0.wrapping_mul(n))
    }

    /// Distance on ℝ/ℤ, in `[0, 1/2]`.
    pub fn circle_distance(self, other: Turn) -> f64 {
        (self - other).to_signed_f64().abs()
    }
}

impl Add for Turn {
    type Output = Turn;
    #[inline]
    fn add(self, rhs: Turn) -> Turn {
        Turn(self.0.wrapping_add(rhs.0))
    }
}

impl Sub for Turn {
    type Output = Turn;
    #[inline]
    fn sub(self, rhs: Turn) -> Turn {
        Turn(self.0.wrapping_sub(rhs.0))
    }
}

impl Neg for Turn {
    type Output = Turn;
    #[inline]
    fn neg(self) -> Turn {
        Turn(self.0.wrapping_neg())
    }
}
