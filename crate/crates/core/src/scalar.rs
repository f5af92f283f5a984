//! Exact rational scalars.
//!
//! Every real quantity on a verification path is a [`Scalar`]: an
//! arbitrary-precision fraction. The only lossy view is [`Scalar::to_f64`],
//! used for rendering and human-facing summaries.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`. Panics when `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Scalar(BigRational::new(num, den))
    }

    /// `10^(-n)`.
    pub fn pow10_neg(n: u32) -> Self {
        Scalar(BigRational::new(BigInt::one(), BigInt::from(10u8).pow(n)))
    }

    /// `10^n`.
    pub fn pow10(n: u32) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(10u8).pow(n)))
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Scalar::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    pub fn half(&self) -> Self {
        Scalar(&self.0 / BigInt::from(2))
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn min_of(a: &Scalar, b: &Scalar) -> Scalar {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    pub fn max_of(a: &Scalar, b: &Scalar) -> Scalar {
        if a >= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Midpoint of `a` and `b`.
    pub fn midpoint(a: &Scalar, b: &Scalar) -> Scalar {
        (a + b).half()
    }

    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && self.0 <= BigRational::one()
    }

    /// Exact square root when `self` is the square of a rational.
    pub fn sqrt_exact(&self) -> Option<Scalar> {
        if self.is_negative() {
            return None;
        }
        let n = self.0.numer().sqrt();
        let d = self.0.denom().sqrt();
        if &(&n * &n) == self.0.numer() && &(&d * &d) == self.0.denom() {
            Some(Scalar(BigRational::new(n, d)))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Huge numerators/denominators: scale down through the bit lengths.
            let n = self.0.numer();
            let d = self.0.denom();
            let shift = n.bits().max(d.bits()).saturating_sub(1000);
            let ns = (n >> shift).to_f64().unwrap_or(0.0);
            let ds = (d >> shift).to_f64().unwrap_or(1.0);
            ns / ds
        })
    }

    /// Largest integer `<= self`.
    pub fn floor_int(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    /// Serialized form: `"p"` for integers, `"p/q"` otherwise.
    pub fn to_fraction_string(&self) -> String {
        if self.0.is_integer() {
            self.0.numer().to_string()
        } else {
            format!("{}/{}", self.0.numer(), self.0.denom())
        }
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fraction_string())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_fraction_string())
    }
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt, Error> {
    BigInt::from_str(s).map_err(|_| Error::Parse(format!("invalid scalar {whole:?}")))
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `"p"`, `"p/q"` and plain decimals such as `"-0.125"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty scalar".into()));
        }
        if let Some((p, q)) = t.split_once('/') {
            let num = parse_int(p.trim(), t)?;
            let den = parse_int(q.trim(), t)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {t:?}")));
            }
            return Ok(Scalar(BigRational::new(num, den)));
        }
        if let Some((ip, fp)) = t.split_once('.') {
            let negative = ip.starts_with('-');
            let ip_digits = ip.trim_start_matches(['-', '+']);
            if !fp.chars().all(|c| c.is_ascii_digit())
                || !ip_digits.chars().all(|c| c.is_ascii_digit())
                || (ip_digits.is_empty() && fp.is_empty())
            {
                return Err(Error::Parse(format!("invalid scalar {t:?}")));
            }
            let digits = format!("{ip_digits}{fp}");
            let mut num = parse_int(if digits.is_empty() { "0" } else { &digits }, t)?;
            if negative {
                num = -num;
            }
            let den = BigInt::from(10u8).pow(fp.len() as u32);
            return Ok(Scalar(BigRational::new(num, den)));
        }
        Ok(Scalar(BigRational::from_integer(parse_int(t, t)?)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_fraction_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Scalar::from_str(&s).map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar($tr::$method(&self.0, &rhs.0))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($tr::$method(self.0, rhs.0))
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar($tr::$method(self.0, &rhs.0))
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                Scalar($tr::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

impl<'a> Sum<&'a Scalar> for Scalar {
    fn sum<I: Iterator<Item = &'a Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl Sum<Scalar> for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

/// A common denominator for a batch of scalars. Numerators on the grid are
/// `i128` and bounded by [`GRID_LIMIT`], so sums and doublings never overflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Grid {
    den: i128,
}

pub(crate) const GRID_LIMIT: i128 = 1 << 100;

impl Grid {
    /// The least common denominator of `values`, if within [`GRID_LIMIT`].
    pub(crate) fn fit<'a>(values: impl IntoIterator<Item = &'a Scalar>) -> Option<Grid> {
        let mut den: i128 = 1;
        for v in values {
            let d = v.0.denom().to_i128()?;
            if den % d != 0 {
                den = den.checked_mul(d / den.gcd(&d))?;
                if den > GRID_LIMIT {
                    return None;
                }
            }
        }
        Some(Grid { den })
    }

    pub(crate) fn with_den(den: i128) -> Option<Grid> {
        (den > 0 && den <= GRID_LIMIT).then_some(Grid { den })
    }

    pub(crate) fn den(&self) -> i128 {
        self.den
    }

    /// `x · den`, when it is an integer within [`GRID_LIMIT`].
    pub(crate) fn lift(&self, x: &Scalar) -> Option<i128> {
        let d = x.0.denom().to_i128()?;
        if self.den % d != 0 {
            return None;
        }
        let v = x.0.numer().to_i128()?.checked_mul(self.den / d)?;
        (v.checked_abs()? <= GRID_LIMIT).then_some(v)
    }

    /// `n / den` in lowest terms.
    pub(crate) fn scalar(&self, n: i128) -> Scalar {
        let g = n.gcd(&self.den);
        Scalar(BigRational::new_raw(BigInt::from(n / g), BigInt::from(self.den / g)))
    }
}

/// Compare `a` and `b` in a way that reads naturally at call sites.
pub fn cmp(a: &Scalar, b: &Scalar) -> Ordering {
    a.cmp(b)
}

/// Shorthand for building scalars in code and tests: `q(1, 10)`.
pub fn q(num: i64, den: i64) -> Scalar {
    Scalar::ratio(num, den)
}
