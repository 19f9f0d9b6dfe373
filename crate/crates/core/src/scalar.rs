//! Scalar arithmetic in exact rational or IEEE-754 double mode.
//!
//! A whole computation runs in exactly one mode, fixed by the type
//! parameter: [`Rational`] for exact arithmetic with no rounding anywhere,
//! or `f64`. The two modes never mix silently; conversion happens only at
//! explicit boundaries (`to_f64`, spec parsing).

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact rational scalar: arbitrary-precision integer numerator and
/// denominator, always kept in lowest terms.
pub type Rational = BigRational;

/// The scalar field a computation runs in.
///
/// Implemented for [`Rational`] (exact mode) and `f64` (float mode).
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    /// True for the exact rational mode.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;

    /// The fraction `num/den`. Panics if `den` is zero.
    fn from_ratio(num: i64, den: i64) -> Self;

    fn is_zero(&self) -> bool;
    fn is_positive(&self) -> bool;

    /// False only for float NaN/infinity; exact scalars are always finite.
    fn is_finite(&self) -> bool;

    /// Lossy conversion to double; the float-mode boundary.
    fn to_f64(&self) -> f64;

    /// Adopt a double value. `None` in exact mode: a computed double has
    /// no canonical preimage among the rationals.
    fn from_f64(x: f64) -> Option<Self>;

    /// Parse a decimal string (`"2"`, `"-0.5"`) or a `"p/q"` rational string.
    fn parse(text: &str) -> Result<Self, Error>;

    /// Render for JSON: `"p/q"` / `"p"` in exact mode, the shortest
    /// round-tripping decimal in float mode.
    fn render(&self) -> String;
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }

    fn one() -> Self {
        <BigRational as One>::one()
    }

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn is_zero(&self) -> bool {
        <BigRational as Zero>::is_zero(self)
    }

    fn is_positive(&self) -> bool {
        <BigRational as Signed>::is_positive(self)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Fall back to the ratio of approximated parts when numerator or
            // denominator alone overflows the double range.
            let num = self.numer().to_f64().unwrap_or(f64::INFINITY);
            let den = self.denom().to_f64().unwrap_or(f64::INFINITY);
            num / den
        })
    }

    fn from_f64(_x: f64) -> Option<Self> {
        None
    }

    fn parse(text: &str) -> Result<Self, Error> {
        parse_rational(text)
    }

    fn render(&self) -> String {
        if self.denom() == &BigInt::from(1) {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn is_positive(&self) -> bool {
        *self > 0.0
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_f64(x: f64) -> Option<Self> {
        Some(x)
    }

    fn parse(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        let value = if let Some((num, den)) = text.split_once('/') {
            let num: f64 = num.trim().parse().map_err(|e| parse_err(text, e))?;
            let den: f64 = den.trim().parse().map_err(|e| parse_err(text, e))?;
            num / den
        } else {
            text.parse().map_err(|e| parse_err(text, e))?
        };
        if !value.is_finite() {
            return Err(Error::ParseScalar {
                text: text.to_string(),
                reason: "not a finite double".to_string(),
            });
        }
        Ok(value)
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

fn parse_err(text: &str, err: impl Display) -> Error {
    Error::ParseScalar {
        text: text.to_string(),
        reason: err.to_string(),
    }
}

fn parse_bigint(text: &str) -> Result<BigInt, Error> {
    text.trim()
        .parse::<BigInt>()
        .map_err(|e| parse_err(text, e))
}

/// Parse `"p/q"`, `"n"`, or `"d.ddd"` into an exact rational.
fn parse_rational(text: &str) -> Result<Rational, Error> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(parse_err(text, "empty string"));
    }
    if let Some((num, den)) = trimmed.split_once('/') {
        let num = parse_bigint(num)?;
        let den = parse_bigint(den)?;
        if den.is_zero() {
            return Err(parse_err(text, "zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = trimmed.split_once('.') {
        let frac_digits = frac_part.trim();
        if frac_digits.is_empty() || !frac_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_err(text, "malformed decimal fraction"));
        }
        let negative = int_part.trim_start().starts_with('-');
        let int_value = if int_part == "-" || int_part.is_empty() {
            BigInt::from(0)
        } else {
            parse_bigint(int_part)?
        };
        let scale = BigInt::from(10u32).pow(frac_digits.len() as u32);
        let frac_value = parse_bigint(frac_digits)?;
        let signed_frac = if negative { -frac_value } else { frac_value };
        return Ok(BigRational::new(int_value * &scale + signed_frac, scale));
    }
    Ok(BigRational::from_integer(parse_bigint(trimmed)?))
}

/// Parse a list of scalar strings, reporting the first offending entry.
pub fn parse_all<S: Scalar>(texts: &[String]) -> Result<Vec<S>, Error> {
    texts.iter().map(|t| S::parse(t)).collect()
}
