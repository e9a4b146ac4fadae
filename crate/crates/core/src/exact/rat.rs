//! Arbitrary-precision rationals and their JSON form.
//!
//! `Ratio` keeps every value in lowest terms with a positive denominator,
//! so no separate normalization pass is needed after arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};

use crate::error::{CalcError, Result};

pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// Parses `"p/q"`, `"p"` or a signed decimal integer string.
pub fn parse(text: &str) -> Result<Rat> {
    let text = text.trim();
    let bad = || CalcError::Parse(format!("not a rational: {text:?}"));
    match text.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(CalcError::Parse(format!("zero denominator in {text:?}")));
            }
            Ok(Rat::new(num, den))
        }
        None => {
            let num: BigInt = text.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(num))
        }
    }
}

pub fn format(value: &Rat) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn sign(value: &Rat) -> i8 {
    if value.is_positive() {
        1
    } else if value.is_negative() {
        -1
    } else {
        0
    }
}

pub fn serialize<S: Serializer>(value: &Rat, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    if value.is_integer() {
        if let Some(small) = value.numer().to_i64() {
            return serializer.serialize_i64(small);
        }
    }
    serializer.serialize_str(&format(value))
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Rat, D::Error> {
    deserializer.deserialize_any(RatVisitor)
}

struct RatVisitor;

impl<'de> Visitor<'de> for RatVisitor {
    type Value = Rat;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an integer or a string \"p/q\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rat, E> {
        Ok(int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rat, E> {
        Ok(Rat::from_integer(BigInt::from(v)))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rat, E> {
        Err(E::custom(format!("floating-point value {v} is not accepted; write it as \"p/q\"")))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rat, E> {
        parse(v).map_err(E::custom)
    }
}

/// Serde adapter for a single `Rat` field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RatJson(pub Rat);

impl serde::Serialize for RatJson {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serialize(&self.0, s)
    }
}

impl<'de> serde::Deserialize<'de> for RatJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        deserialize(d).map(RatJson)
    }
}

/// Serde adapter for optional bounds, where `None` means an infinite value.
pub mod opt {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Rat>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match value {
            Some(v) => super::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rat>, D::Error> {
        let raw: Option<RatJson> = serde::Deserialize::deserialize(d)?;
        Ok(raw.map(|r| r.0))
    }
}
