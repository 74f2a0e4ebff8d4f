//! Exact rational helpers: parsing, `num/den` formatting, and
//! rationalization of floating-point inputs.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

/// Denominator cap applied to float-valued inputs unless overridden.
pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RationalError {
    #[error("cannot parse `{0}` as a rational")]
    Parse(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),
    #[error("{value} has no exact rational form with denominator <= {max_denominator}")]
    Inexact { value: f64, max_denominator: u64 },
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Always `num/den`, including integers (`1/1`, `0/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `a/b`, integers, and plain decimals such as `0.375` or `-1.25e-2`.
/// Decimals are converted exactly from their written form.
pub fn parse_rational(text: &str) -> Result<Rational, RationalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(RationalError::Parse(text.to_string()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| RationalError::Parse(text.to_string()))?;
        let d: BigInt = d.trim().parse().map_err(|_| RationalError::Parse(text.to_string()))?;
        if d.is_zero() {
            return Err(RationalError::ZeroDenominator(text.to_string()));
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s).ok_or_else(|| RationalError::Parse(text.to_string()))
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{whole}{frac}");
    let mut value = Rational::from_integer(all.parse::<BigInt>().ok()?);
    let scale = exponent - frac.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num::pow(ten, scale as usize);
    } else {
        value /= num::pow(ten, (-scale) as usize);
    }
    Some(if negative { -value } else { value })
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions with a final semiconvergent).
pub fn rationalize(x: f64, max_den: u64) -> Result<Rational, RationalError> {
    if !x.is_finite() {
        return Err(RationalError::NonFinite(x));
    }
    let max_den = max_den.max(1) as i128;
    let negative = x < 0.0;
    let target = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut rest = target;
    let (num, den) = loop {
        let a = rest.floor();
        if a > 1e17 {
            break (p1, q1);
        }
        let a = a as i128;
        let p2 = a * p1 + p0;
        let q2 = a * q1 + q0;
        if q2 > max_den {
            let k = (max_den - q0) / q1;
            let (ps, qs) = (p0 + k * p1, q0 + k * q1);
            let semi = (ps as f64 / qs as f64 - target).abs();
            let conv = (p1 as f64 / q1 as f64 - target).abs();
            break if semi < conv { (ps, qs) } else { (p1, q1) };
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = rest - a as f64;
        if frac == 0.0 {
            break (p1, q1);
        }
        rest = 1.0 / frac;
    };
    let r = Rational::new(BigInt::from(num), BigInt::from(den));
    Ok(if negative { -r } else { r })
}

/// How float-valued weights become exact rationals.
///
/// In strict mode a value is accepted only when its rationalization converts
/// back to the very same `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RationalizePolicy {
    pub max_denominator: u64,
    pub strict: bool,
}

impl Default for RationalizePolicy {
    fn default() -> Self {
        RationalizePolicy { max_denominator: DEFAULT_MAX_DENOMINATOR, strict: false }
    }
}

impl RationalizePolicy {
    pub fn strict() -> Self {
        RationalizePolicy { strict: true, ..Default::default() }
    }

    pub fn apply(&self, x: f64) -> Result<Rational, RationalError> {
        let r = rationalize(x, self.max_denominator)?;
        if self.strict && to_f64(&r) != x {
            return Err(RationalError::Inexact { value: x, max_denominator: self.max_denominator });
        }
        Ok(r)
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn is_nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

pub fn sum<'a, I: IntoIterator<Item = &'a Rational>>(items: I) -> Rational {
    items.into_iter().fold(Rational::zero(), |acc, x| acc + x)
}

pub fn one() -> Rational {
    Rational::one()
}

/// Serde adapters writing rationals as `num/den` strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rational_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        items.iter().map(|t| parse_rational(t).map_err(serde::de::Error::custom)).collect()
    }
}
