//! Exact rational numbers and their textual forms.
//!
//! Every belief, weight and bound in the engine is an exact fraction. Decimal
//! input such as `0.7` is read as `7/10`, so tables built from human-authored
//! cases are reproduced without rounding drift. Rounding only happens in
//! [`format_two_digits`], which is presentation.

use alloc::format;
use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision fraction used throughout the crate.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalParseError {
    #[error("empty number")]
    Empty,
    #[error("invalid number `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `int`, `int/int` or a plain decimal (`0.75`, `-1.5`, `.5`).
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let invalid = || RationalParseError::Invalid(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num.trim()).ok_or_else(invalid)?;
        let den_str = den.trim();
        if den_str.starts_with(['+', '-']) {
            return Err(invalid());
        }
        let den = parse_int(den_str).ok_or_else(invalid)?;
        if den.is_zero() {
            return Err(RationalParseError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(invalid());
    }
    if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid());
    }
    if body.ends_with('.') {
        return Err(invalid());
    }
    let digits = format!("{whole}{frac}");
    let num: BigInt = digits.parse().map_err(|_| invalid())?;
    let den = num_traits::pow(BigInt::from(10u32), frac.len());
    let value = Rational::new(num, den);
    Ok(if negative { -value } else { value })
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `7/10`, `-1`, `0`. Parses back with [`parse_rational`].
pub fn format_exact(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Rounds half away from zero to two decimals and drops trailing zeros:
/// `1/3` is `0.33`, `8/9` is `0.89`, `1/10` is `0.1`, `1` is `1`.
pub fn format_two_digits(value: &Rational) -> String {
    let hundred = BigInt::from(100u32);
    let scaled = value.abs() * Rational::from_integer(hundred.clone());
    let rounded = (scaled + ratio(1, 2)).floor().to_integer();
    if rounded.is_zero() {
        return "0".to_string();
    }
    let (whole, frac) = rounded.div_rem(&hundred);
    let sign = if value.is_negative() { "-" } else { "" };
    if frac.is_zero() {
        return format!("{sign}{whole}");
    }
    let mut frac = format!("{frac:0>2}");
    while frac.ends_with('0') {
        frac.pop();
    }
    format!("{sign}{whole}.{frac}")
}

/// Table cell for an interval: `[0, 0.33]`, or a scalar when both ends agree.
pub fn format_interval(lower: &Rational, upper: &Rational) -> String {
    if lower == upper {
        format_two_digits(lower)
    } else {
        format!("[{}, {}]", format_two_digits(lower), format_two_digits(upper))
    }
}

pub(crate) fn zero() -> Rational {
    Rational::zero()
}

pub(crate) fn one() -> Rational {
    Rational::one()
}
