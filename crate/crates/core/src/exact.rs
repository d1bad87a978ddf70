//! Exact dyadic rationals `num / 2^k`.
//!
//! Every eigenvalue, probability and bound handled by this crate has a
//! power-of-two denominator, so a big-integer numerator plus a denominator
//! exponent is enough to keep all comparisons exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// The value `num / 2^den_log2`, kept in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: BigInt,
    den_log2: u64,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, den_log2: u64) -> Self {
        let mut d = Dyadic {
            num: num.into(),
            den_log2,
        };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic::new(0, 0)
    }

    pub fn one() -> Self {
        Dyadic::new(1, 0)
    }

    pub fn from_int(v: impl Into<BigInt>) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^exp` for any signed exponent.
    pub fn pow2(exp: i64) -> Self {
        if exp >= 0 {
            Dyadic::new(BigInt::one() << exp as u64, 0)
        } else {
            Dyadic::new(1, exp.unsigned_abs())
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn den_log2(&self) -> u64 {
        self.den_log2
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            num: self.num.abs(),
            den_log2: self.den_log2,
        }
    }

    /// `max(self, 0)`.
    pub fn clamp_nonnegative(self) -> Self {
        if self.is_negative() {
            Dyadic::zero()
        } else {
            self
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        Dyadic::new(
            num_traits::pow(self.num.clone(), e as usize),
            self.den_log2 * e as u64,
        )
    }

    /// Nearest `f64`, computed without intermediate overflow.
    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let bits = self.num.bits();
        let shift = bits.saturating_sub(62);
        let mantissa = (&self.num >> shift).to_f64().unwrap_or(0.0);
        ldexp(mantissa, shift as i64 - self.den_log2 as i64)
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den_log2 = 0;
            return;
        }
        let tz = self.num.trailing_zeros().unwrap_or(0).min(self.den_log2);
        if tz > 0 {
            self.num >>= tz;
            self.den_log2 -= tz;
        }
    }

    /// Both numerators scaled to the common denominator `2^max(k1, k2)`.
    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, u64) {
        let k = self.den_log2.max(other.den_log2);
        (
            &self.num << (k - self.den_log2),
            &other.num << (k - other.den_log2),
            k,
        )
    }
}

fn ldexp(mut x: f64, mut exp: i64) -> f64 {
    while exp > 1000 {
        x *= 2f64.powi(1000);
        exp -= 1000;
    }
    while exp < -1000 {
        x *= 2f64.powi(-1000);
        exp += 1000;
    }
    x * 2f64.powi(exp as i32)
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_int(v)
    }
}

impl From<BigUint> for Dyadic {
    fn from(v: BigUint) -> Self {
        Dyadic::from_int(BigInt::from_biguint(Sign::Plus, v))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, k) = self.aligned(rhs);
        Dyadic::new(a + b, k)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        let (a, b, k) = self.aligned(rhs);
        Dyadic::new(a - b, k)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.num * &rhs.num, self.den_log2 + rhs.den_log2)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic {
            num: -self.num,
            den_log2: self.den_log2,
        }
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::zero(), |acc, x| &acc + &x)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den_log2 == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.den_log2)
        }
    }
}

/// Serialised as `{"num": "<decimal>", "den_log2": k, "value": <f64>}`; the
/// numerator is a string because it routinely exceeds 64 bits.
impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Dyadic", 3)?;
        s.serialize_field("num", &self.num.to_string())?;
        s.serialize_field("den_log2", &self.den_log2)?;
        s.serialize_field("value", &self.to_f64())?;
        s.end()
    }
}
