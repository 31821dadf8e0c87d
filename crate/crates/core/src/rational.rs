//! Exact rational scalars.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"`, `"-p/q"` or an integer literal. Surrounding whitespace is ignored.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err("empty rational literal".into());
    }
    if let Some((num, den)) = trimmed.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| format!("bad numerator in {trimmed:?}"))?;
        let den = BigInt::from_str(den.trim()).map_err(|_| format!("bad denominator in {trimmed:?}"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in {trimmed:?}"));
        }
        Ok(Rational::new(num, den))
    } else {
        BigInt::from_str(trimmed)
            .map(Rational::from_integer)
            .map_err(|_| format!("not a rational literal: {trimmed:?}"))
    }
}

/// Canonical text form: reduced `p/q`, or `p` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn format_vector(values: &[Rational]) -> String {
    let parts: Vec<String> = values.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

/// Smallest integer `n` with `n >= q`.
pub fn ceil_to_usize(q: &Rational) -> usize {
    let c = q.ceil().to_integer();
    if c <= BigInt::zero() {
        0
    } else {
        c.try_into().unwrap_or(usize::MAX)
    }
}
