//! Signed real numbers stored as `sign * exp(ln)`, for quantities far outside
//! the double range (tower scales reach 1e-300 and beyond).

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    sign: i8,
    ln: f64,
}

/// Decimal representation `mantissa * 10^log10` with `1 <= |mantissa| < 10`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decimal {
    pub mantissa: f64,
    pub log10: i64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled { sign: 0, ln: f64::NEG_INFINITY };

    /// Positive number with the given natural logarithm.
    pub fn from_ln(ln: f64) -> Self {
        if ln == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Scaled { sign: 1, ln }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            Scaled { sign: if x > 0.0 { 1 } else { -1 }, ln: x.abs().ln() }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn signum(&self) -> f64 {
        self.sign as f64
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn ln_abs(&self) -> f64 {
        self.ln
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    /// Nearest double; may underflow to 0 or overflow to infinity.
    pub fn to_f64(&self) -> f64 {
        self.sign as f64 * self.ln.exp()
    }

    pub fn abs(&self) -> Self {
        if self.is_zero() {
            *self
        } else {
            Scaled { sign: 1, ln: self.ln }
        }
    }

    pub fn powf(&self, e: f64) -> Self {
        assert!(self.sign >= 0, "fractional power of a negative Scaled");
        if self.is_zero() {
            return if e > 0.0 { *self } else { Scaled::from_f64(1.0) };
        }
        Scaled::from_ln(self.ln * e)
    }

    /// Ratio of two numbers as a double (both may be denormal-range).
    pub fn ratio(&self, other: &Scaled) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        (self.sign * other.sign) as f64 * (self.ln - other.ln).exp()
    }

    pub fn decimal(&self) -> Decimal {
        if self.is_zero() {
            return Decimal { mantissa: 0.0, log10: 0 };
        }
        let l = self.log10_abs();
        let mut e = l.floor();
        let mut m = 10f64.powf(l - e);
        if m >= 10.0 {
            m /= 10.0;
            e += 1.0;
        }
        Decimal { mantissa: self.sign as f64 * m, log10: e as i64 }
    }

    /// Sum with a single rescaling by the largest magnitude.
    pub fn sum<I: IntoIterator<Item = Scaled>>(items: I) -> Scaled {
        let v: Vec<Scaled> = items.into_iter().filter(|s| !s.is_zero()).collect();
        let Some(top) = v.iter().map(|s| s.ln).reduce(f64::max) else {
            return Scaled::ZERO;
        };
        let acc: f64 = v.iter().map(|s| s.sign as f64 * (s.ln - top).exp()).sum();
        Scaled::from_f64(acc).mul_ln(top)
    }

    fn mul_ln(self, ln: f64) -> Scaled {
        if self.is_zero() {
            self
        } else {
            Scaled { sign: self.sign, ln: self.ln + ln }
        }
    }
}

/// Serialised as its [`Decimal`] form.
impl Serialize for Scaled {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.decimal().serialize(s)
    }
}

impl From<f64> for Scaled {
    fn from(x: f64) -> Self {
        Scaled::from_f64(x)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled { sign: -self.sign, ln: self.ln }
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, rhs: Scaled) -> Scaled {
        Scaled::sum([self, rhs])
    }
}

impl Sub for Scaled {
    type Output = Scaled;
    fn sub(self, rhs: Scaled) -> Scaled {
        Scaled::sum([self, -rhs])
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        if self.is_zero() || rhs.is_zero() {
            return Scaled::ZERO;
        }
        Scaled { sign: self.sign * rhs.sign, ln: self.ln + rhs.ln }
    }
}

impl Decimal {
    pub fn to_f64(&self) -> f64 {
        self.mantissa * 10f64.powi(self.log10 as i32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_beyond_double_range() {
        let a = Scaled::from_ln(-1000.0);
        let b = Scaled::from_ln(-1000.0 + 2f64.ln());
        let s = a + b;
        assert!((s.ln_abs() - (-1000.0 + 3f64.ln())).abs() < 1e-12);
        let d = b - a - a;
        // ln near 1000 carries an absolute ulp of ~1e-13.
        assert!(d.is_zero() || d.ln_abs() < -1000.0 - 25.0);
        assert_eq!((a * b).ln_abs(), -2000.0 + 2f64.ln());
    }

    #[test]
    fn decimal_form() {
        let d = Scaled::from_f64(-3.5e-7).decimal();
        assert!((d.mantissa + 3.5).abs() < 1e-12);
        assert_eq!(d.log10, -7);
        let big = Scaled::from_ln(1000.0).decimal();
        assert_eq!(big.log10, 434);
    }
}
