//! Exact rational numbers.
//!
//! Every probability, weight and LP coefficient in the toolkit is a
//! [`Rational`]. Values are always kept in reduced form with a positive
//! denominator, which `num-rational` guarantees on construction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("decimal literal `{0}` is not allowed, write it as a fraction")]
    Decimal(String),
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `int` or `int/int`. Decimal notation is rejected.
pub fn parse_rational(text: &str) -> Result<Rational, RationalError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(RationalError::Empty);
    }
    if text.contains('.') || text.contains('e') || text.contains('E') {
        return Err(RationalError::Decimal(text.to_string()));
    }
    let parse_int = |s: &str| -> Result<BigInt, RationalError> {
        let s = s.trim();
        let digits = s.strip_prefix('-').unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(RationalError::Malformed(text.to_string()));
        }
        s.parse::<BigInt>()
            .map_err(|_| RationalError::Malformed(text.to_string()))
    };
    match text.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(text)?)),
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(RationalError::ZeroDenominator(text.to_string()));
            }
            Ok(Rational::new(n, d))
        }
    }
}

/// Renders as `n` or `n/d`; never as a decimal.
pub fn fmt_rational(r: &Rational) -> String {
    RatDisplay(r).to_string()
}

pub struct RatDisplay<'a>(pub &'a Rational);

impl fmt::Display for RatDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}
