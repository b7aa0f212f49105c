//! Extended-range real numbers.
//!
//! Opaque barriers produce factors like `cosh(2ξ)` that leave the `f64`
//! range long before the quantities built from them (phases, ratios such as
//! `d_α / v_α`) stop being meaningful. [`ExtFloat`] stores a value as
//! `m · 2^e` with `m ∈ [0.5, 1)` and a separate `i64` binary exponent, so
//! products and quotients never overflow and scaling by powers of two is
//! exact. Additions align exponents, which gives the same relative accuracy
//! as plain `f64` arithmetic would have had without overflow.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtFloat {
    mant: f64,
    exp: i64,
}

const LN_2: f64 = std::f64::consts::LN_2;

/// Splits a finite non-zero `x` into `(m, e)` with `x = m · 2^e`, `|m| ∈ [0.5, 1)`.
fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let mut bits = x.to_bits();
    let mut biased = ((bits >> 52) & 0x7ff) as i64;
    let mut extra = 0;
    if biased == 0 {
        // subnormal
        let y = x * f64::from_bits(0x4350_0000_0000_0000); // 2^54
        bits = y.to_bits();
        biased = ((bits >> 52) & 0x7ff) as i64;
        extra = -54;
    }
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1022 << 52));
    (m, biased - 1022 + extra)
}

/// `m · 2^e` as an `f64`, saturating to `±inf` or `±0`.
fn ldexp(m: f64, e: i64) -> f64 {
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    let mut x = m;
    let mut e = e.clamp(-2200, 2200);
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat { mant: 0.0, exp: 0 };
    pub const ONE: ExtFloat = ExtFloat { mant: 0.5, exp: 1 };

    fn normalized(mant: f64, exp: i64) -> Self {
        if mant == 0.0 || !mant.is_finite() {
            return ExtFloat { mant, exp: 0 };
        }
        let (m, e) = frexp(mant);
        ExtFloat {
            mant: m,
            exp: exp + e,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        Self::normalized(x, 0)
    }

    /// Converts back to `f64`; overflows to `±inf`, underflows to `0`.
    pub fn to_f64(self) -> f64 {
        ldexp(self.mant, self.exp)
    }

    /// `e^x` for any finite `x`.
    pub fn exp(x: f64) -> Self {
        let n = (x / LN_2).floor();
        let r = x - n * LN_2;
        Self::normalized(r.exp(), n as i64)
    }

    /// `sinh(x)` without cancellation for small `|x|` and without overflow for large.
    pub fn sinh(x: f64) -> Self {
        let a = x.abs();
        if a < 1.0 {
            return Self::from_f64(x.sinh());
        }
        let v = Self::exp(a) * (-0.5 * (-2.0 * a).exp_m1());
        if x < 0.0 {
            -v
        } else {
            v
        }
    }

    pub fn cosh(x: f64) -> Self {
        let a = x.abs();
        if a < 1.0 {
            return Self::from_f64(x.cosh());
        }
        Self::exp(a) * (0.5 * (1.0 + (-2.0 * a).exp()))
    }

    pub fn is_zero(self) -> bool {
        self.mant == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.mant.is_finite()
    }

    pub fn abs(self) -> Self {
        ExtFloat {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn signum(self) -> f64 {
        if self.mant == 0.0 {
            0.0
        } else {
            self.mant.signum()
        }
    }

    /// Square root of a non-negative value; negative input yields NaN.
    pub fn sqrt(self) -> Self {
        if self.mant == 0.0 {
            return self;
        }
        if self.exp % 2 == 0 {
            Self::normalized(self.mant.sqrt(), self.exp / 2)
        } else {
            Self::normalized((2.0 * self.mant).sqrt(), (self.exp - 1).div_euclid(2))
        }
    }

    pub fn powi(self, n: u32) -> Self {
        (0..n).fold(Self::ONE, |acc, _| acc * self)
    }

    /// Natural logarithm of `|self|`.
    pub fn ln_abs(self) -> f64 {
        self.mant.abs().ln() + self.exp as f64 * LN_2
    }

    /// Two-argument arctangent of `self / x` in `(-π, π]`.
    pub fn atan2(self, x: ExtFloat) -> f64 {
        let shift = self.exp.max(x.exp);
        ldexp(self.mant, self.exp - shift).atan2(ldexp(x.mant, x.exp - shift))
    }

    /// Binary exponent of the normalized representation.
    pub fn exponent(self) -> i64 {
        self.exp
    }
}

impl From<f64> for ExtFloat {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl Add for ExtFloat {
    type Output = ExtFloat;
    fn add(self, rhs: ExtFloat) -> ExtFloat {
        if rhs.mant == 0.0 {
            return self;
        }
        if self.mant == 0.0 {
            return rhs;
        }
        let (big, small) = if self.exp >= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let aligned = ldexp(small.mant, small.exp - big.exp);
        Self::normalized(big.mant + aligned, big.exp)
    }
}

impl Sub for ExtFloat {
    type Output = ExtFloat;
    fn sub(self, rhs: ExtFloat) -> ExtFloat {
        self + (-rhs)
    }
}

impl Neg for ExtFloat {
    type Output = ExtFloat;
    fn neg(self) -> ExtFloat {
        ExtFloat {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl Mul for ExtFloat {
    type Output = ExtFloat;
    fn mul(self, rhs: ExtFloat) -> ExtFloat {
        Self::normalized(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Mul<f64> for ExtFloat {
    type Output = ExtFloat;
    fn mul(self, rhs: f64) -> ExtFloat {
        Self::normalized(self.mant * rhs, self.exp)
    }
}

impl Mul<ExtFloat> for f64 {
    type Output = ExtFloat;
    fn mul(self, rhs: ExtFloat) -> ExtFloat {
        rhs * self
    }
}

impl Add<f64> for ExtFloat {
    type Output = ExtFloat;
    fn add(self, rhs: f64) -> ExtFloat {
        self + ExtFloat::from_f64(rhs)
    }
}

impl Sub<f64> for ExtFloat {
    type Output = ExtFloat;
    fn sub(self, rhs: f64) -> ExtFloat {
        self - ExtFloat::from_f64(rhs)
    }
}

impl Div for ExtFloat {
    type Output = ExtFloat;
    fn div(self, rhs: ExtFloat) -> ExtFloat {
        Self::normalized(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl Div<f64> for ExtFloat {
    type Output = ExtFloat;
    fn div(self, rhs: f64) -> ExtFloat {
        self / ExtFloat::from_f64(rhs)
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = *self - *other;
        if d.mant.is_nan() {
            None
        } else {
            d.mant.partial_cmp(&0.0)
        }
    }
}

impl fmt::Debug for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtFloat({})", self)
    }
}

impl fmt::Display for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = self.to_f64();
        if x.is_finite() && (x == 0.0 || x.abs() > 1e-300) {
            return write!(f, "{x:e}");
        }
        // decimal mantissa/exponent for out-of-range values
        let log10 = self.ln_abs() / std::f64::consts::LN_10;
        let e10 = log10.floor();
        let m10 = self.signum() * 10f64.powf(log10 - e10);
        write!(f, "{m10}e{e10}")
    }
}
