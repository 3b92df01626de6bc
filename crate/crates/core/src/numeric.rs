//! Exact arithmetic helpers: rational parsing, ceilings, and rigorous
//! brackets for logarithms and roots.
//!
//! Nothing in here touches floating point except [`approx`], which exists
//! for human-readable summaries.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational parameter such as ε or r, written as `p/q` or as a
/// decimal literal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio(pub BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse {input:?} as an exact rational")]
pub struct ParseRatioError {
    pub input: String,
}

impl Ratio {
    pub fn new(numer: i64, denom: i64) -> Self {
        Ratio(BigRational::new(numer.into(), denom.into()))
    }

    pub fn integer(v: i64) -> Self {
        Ratio(BigRational::from_integer(v.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn approx(&self) -> f64 {
        approx(&self.0)
    }
}

impl FromStr for Ratio {
    type Err = ParseRatioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s).map(Ratio)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `p/q`, an integer, or a plain decimal (`0.125`, `-3.5`) exactly.
pub fn parse_rational(input: &str) -> Result<BigRational, ParseRatioError> {
    let err = || ParseRatioError {
        input: input.to_string(),
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| err())?
    };
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let value = BigRational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

pub fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    let (q, r) = a.div_rem(b);
    if r.is_zero() {
        q
    } else {
        q + 1u32
    }
}

/// Ceiling of a non-negative rational.
pub fn ceil_nonneg(x: &BigRational) -> BigUint {
    let c = x.ceil().to_integer();
    c.to_biguint().expect("ceil_nonneg called with a negative value")
}

pub fn to_uint(x: &BigInt) -> Option<BigUint> {
    x.to_biguint()
}

pub fn rational_from_uint(n: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
}

pub fn rational_pow(x: &BigRational, e: u64) -> BigRational {
    BigRational::new(Pow::pow(x.numer(), e), Pow::pow(x.denom(), e))
}

/// Lossy conversion for summaries only.
pub fn approx(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Huge numerators: scale both sides down by the same power of two.
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = (nb.max(db) - 900).max(0) as usize;
    let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    if d == 0.0 {
        if n.is_sign_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        n / d
    }
}

pub fn approx_uint(x: &BigUint) -> f64 {
    approx(&rational_from_uint(x))
}

/// A value `mantissa · 2^exponent` used for directed-rounding interval
/// arithmetic.
#[derive(Clone, Debug)]
struct Scaled {
    mantissa: BigUint,
    exponent: BigInt,
}

impl Scaled {
    fn from_ratio(x: &BigRational, precision: u64, round_up: bool) -> Self {
        let a = x.numer().magnitude().clone();
        let b = x.denom().magnitude().clone();
        let shift = (precision as i64 + b.bits() as i64 - a.bits() as i64 + 1).max(0) as usize;
        let (q, r) = (&a << shift).div_rem(&b);
        let mantissa = if round_up && !r.is_zero() { q + 1u32 } else { q };
        let mut s = Scaled {
            mantissa,
            exponent: BigInt::from(-(shift as i64)),
        };
        s.normalize(precision, round_up);
        s
    }

    fn normalize(&mut self, precision: u64, round_up: bool) {
        let bits = self.mantissa.bits();
        if bits > precision {
            let k = (bits - precision) as usize;
            let lost = !(&self.mantissa & ((BigUint::one() << k) - 1u32)).is_zero();
            self.mantissa >>= k;
            if round_up && lost {
                self.mantissa += 1u32;
            }
            self.exponent += k as i64;
        }
    }

    fn square(&mut self, precision: u64, round_up: bool) {
        self.mantissa = &self.mantissa * &self.mantissa;
        self.exponent *= 2;
        self.normalize(precision, round_up);
    }

    /// floor(log2) of the represented value.
    fn log2_floor(&self) -> BigInt {
        &self.exponent + (self.mantissa.bits() as i64 - 1)
    }

    /// ceil(log2) of the represented value.
    fn log2_ceil(&self) -> BigInt {
        let bits = self.mantissa.bits() as i64;
        let exact_power = self.mantissa.count_ones() == 1;
        &self.exponent + if exact_power { bits - 1 } else { bits }
    }
}

/// Rigorous bracket `lo ≤ log2(x) ≤ hi` for a positive rational `x`.
///
/// The bracket width is at most `2^(1 - iterations)`; exact powers of two
/// collapse to a point.
pub fn log2_bracket(x: &BigRational, iterations: u32) -> (BigRational, BigRational) {
    assert!(x.is_positive(), "log2 of a non-positive value");
    let precision = 2 * iterations as u64 + 96;
    let mut lo = Scaled::from_ratio(x, precision, false);
    let mut hi = Scaled::from_ratio(x, precision, true);
    for _ in 0..iterations {
        lo.square(precision, false);
        hi.square(precision, true);
    }
    let scale = BigInt::one() << iterations as usize;
    let lower = BigRational::new(lo.log2_floor(), scale.clone());
    let upper = BigRational::new(hi.log2_ceil(), scale);
    (lower, upper)
}

/// `floor(value^(1/k) · 10^digits)` computed exactly.
pub fn root_floor_scaled(value: &BigRational, k: u32, digits: u32) -> BigUint {
    assert!(k >= 1);
    assert!(!value.is_negative(), "root of a negative value");
    let scale = BigUint::from(10u32).pow(digits * k);
    let scaled = rational_from_uint(&scale) * value;
    let floor = scaled.floor().to_integer().to_biguint().expect("non-negative");
    floor.nth_root(k)
}

/// Formats `scaled / 10^digits` as a decimal, trimming trailing zeros but
/// keeping at least one fractional digit.
pub fn format_scaled(scaled: &BigUint, digits: u32) -> String {
    let s = scaled.to_str_radix(10);
    let d = digits as usize;
    let padded = if s.len() <= d {
        format!("{}{}", "0".repeat(d + 1 - s.len()), s)
    } else {
        s
    };
    let (int_part, frac_part) = padded.split_at(padded.len() - d);
    let trimmed = frac_part.trim_end_matches('0');
    let frac = if trimmed.is_empty() { "0" } else { trimmed };
    format!("{int_part}.{frac}")
}

/// Decimal rendering of a non-negative rational, truncated to `digits`.
pub fn decimal_floor(x: &BigRational, digits: u32) -> String {
    format_scaled(&root_floor_scaled(x, 1, digits), digits)
}

pub(crate) mod serde_big {
    use super::*;

    pub fn uint<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn uint_de<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }

    pub fn rational<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(&Ratio(v.clone()))
    }
}
