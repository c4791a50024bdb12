//! Exact rational scalars and their textual forms.
//!
//! Every quantity in this crate is a [`Rational`]. Text forms are either an
//! integer (`-3`) or a reduced fraction (`7/2`); floats are never accepted.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"`, `"p/q"` or `"-p/q"`. A zero denominator is an error.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let text = text.trim();
    let bad = |message: &str| Error::Parse {
        context: format!("rational {text:?}"),
        message: message.to_string(),
    };
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad("numerator is not an integer"))?;
    let den: BigInt = den.parse().map_err(|_| bad("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text: `p` when integral, otherwise `p/q` in lowest terms.
pub fn format_rational(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Largest integer not exceeding `value`.
pub fn floor(value: &Rational) -> BigInt {
    value.numer().div_floor(value.denom())
}

pub fn sign(value: &Rational) -> i8 {
    if value.is_positive() {
        1
    } else if value.is_negative() {
        -1
    } else {
        0
    }
}

pub fn pow2_inverse(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

/// Serde adapter writing rationals as strings and reading strings or integers.
pub mod as_string {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        RationalText::deserialize(d)?
            .into_rational()
            .map_err(serde::de::Error::custom)
    }
}

pub mod vec_as_string {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let text: Vec<String> = values.iter().map(format_rational).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<RationalText>::deserialize(d)?
            .into_iter()
            .map(RationalText::into_rational)
            .collect::<Result<_, _>>()
            .map_err(serde::de::Error::custom)
    }
}

/// Document-level representation: a bare integer or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalText {
    Integer(i64),
    Text(String),
}

impl RationalText {
    pub fn into_rational(self) -> Result<Rational, Error> {
        match self {
            RationalText::Integer(n) => Ok(int(n)),
            RationalText::Text(t) => parse_rational(&t),
        }
    }

    /// Integers that fit in `i64` are written bare, everything else as text.
    pub fn from_rational(value: &Rational) -> Self {
        use num_traits::ToPrimitive;
        match value.is_integer().then(|| value.numer().to_i64()).flatten() {
            Some(n) => RationalText::Integer(n),
            None => RationalText::Text(format_rational(value)),
        }
    }
}
