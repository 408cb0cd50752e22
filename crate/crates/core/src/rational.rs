//! Exact rational arithmetic helpers.
//!
//! Every quantity in this crate (costs, payoffs, probabilities, smoothness
//! parameters) is a `BigRational`. Values serialize as `"p/q"` strings so
//! that no precision is lost on the wire.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// Rational from a numerator/denominator pair.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Rational from an integer.
pub fn qi(num: i64) -> Q {
    Q::from_integer(BigInt::from(num))
}

pub fn qu(num: usize) -> Q {
    Q::from_integer(BigInt::from(num))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"` into a rational.
pub fn parse_q(text: &str) -> Result<Q> {
    let text = text.trim();
    let make_err = || Error::Parse(format!("invalid rational {text:?}, expected \"p\" or \"p/q\""));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (text, None),
    };
    let num: BigInt = num.parse().map_err(|_| make_err())?;
    let den: BigInt = match den {
        Some(d) => d.parse().map_err(|_| make_err())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Q::new(num, den))
}

/// Canonical `"p/q"` rendering; integers print without a denominator.
pub fn format_q(value: &Q) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn is_nonnegative(value: &Q) -> bool {
    !value.is_negative()
}

/// Lossy conversion for display and cross-checks against float oracles.
pub fn to_f64(value: &Q) -> f64 {
    use num::ToPrimitive;
    value.to_f64().unwrap_or(f64::NAN)
}

/// Serde wrapper: a rational carried as a `"p/q"` string in JSON.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct QStr(pub Q);

impl Serialize for QStr {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_q(&self.0))
    }
}

impl<'de> Deserialize<'de> for QStr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_q(&text).map(QStr).map_err(serde::de::Error::custom)
    }
}

impl From<Q> for QStr {
    fn from(value: Q) -> Self {
        QStr(value)
    }
}
