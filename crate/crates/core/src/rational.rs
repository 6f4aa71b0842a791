//! Exact rationals and their `p/q` text form.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

/// Arbitrary-precision exact rational used for every probability and payoff.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalParseError {
    Empty,
    InvalidInteger(String),
    ZeroDenominator,
    NegativeDenominator,
}

impl fmt::Display for RationalParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => f.write_str("empty rational"),
            Self::InvalidInteger(tok) => write!(f, "invalid integer {tok:?}"),
            Self::ZeroDenominator => f.write_str("zero denominator"),
            Self::NegativeDenominator => f.write_str("denominator must be a positive integer"),
        }
    }
}

impl std::error::Error for RationalParseError {}

fn parse_integer(tok: &str) -> Result<BigInt, RationalParseError> {
    let digits = tok.strip_prefix(['-', '+']).unwrap_or(tok);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(RationalParseError::InvalidInteger(tok.to_string()));
    }
    tok.parse()
        .map_err(|_| RationalParseError::InvalidInteger(tok.to_string()))
}

/// Parses `"n"` or `"p/q"` with `q > 0`. Whitespace around the parts is ignored.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(RationalParseError::Empty);
    }
    match text.split_once('/') {
        None => Ok(Rational::from_integer(parse_integer(text)?)),
        Some((num, den)) => {
            let num = parse_integer(num.trim())?;
            let den_tok = den.trim();
            if den_tok.starts_with('-') {
                return Err(RationalParseError::NegativeDenominator);
            }
            let den = parse_integer(den_tok)?;
            if den.is_zero() {
                return Err(RationalParseError::ZeroDenominator);
            }
            if den.is_negative() {
                return Err(RationalParseError::NegativeDenominator);
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Canonical text form: reduced `p/q`, or a bare integer when `q = 1`.
pub fn format_rational(value: &Rational) -> String {
    value.to_string()
}

/// `Rational` from a small numerator/denominator pair.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Serde adapter writing rationals as canonical strings.
pub mod as_string {
    use serde::Serializer;

    use super::{format_rational, Rational};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }
}
