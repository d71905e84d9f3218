//! Exact rational scalars, optionally extended with `-inf`/`inf` endpoints.
//!
//! The textual form used by every file format is a string: `"p/q"`, an
//! integer string `"p"`, or `"-inf"`/`"inf"`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number; always stored gcd-reduced with positive denominator.
pub type Rat = BigRational;

/// Shorthand for `num/den` with machine integers. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`. The sign may sit on either component; the result
/// is reduced with a positive denominator.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::BadRational(s.to_string());
    match s.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(num, den))
        }
        None => {
            let num: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(num))
        }
    }
}

/// Formats a rational as `"p"` when integral and `"p/q"` otherwise.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter: a `Rat` field as its canonical string.
pub mod rat_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(de)?;
        parse_rat(&s).map_err(de::Error::custom)
    }
}

/// Serde adapter: an `Option<Rat>` field as a string or `null`.
pub mod rat_string_opt {
    use super::*;

    pub fn serialize<S: Serializer>(
        r: &Option<Rat>,
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => ser.serialize_some(&format_rat(r)),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<Option<Rat>, D::Error> {
        let s: Option<String> = Option::deserialize(de)?;
        s.map(|s| parse_rat(&s).map_err(de::Error::custom)).transpose()
    }
}

/// A rational extended with the two infinities.
///
/// Infinite values only ever appear as open interval endpoints.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    NegInf,
    Finite(Rat),
    PosInf,
}

impl Scalar {
    pub fn finite(r: Rat) -> Self {
        Scalar::Finite(r)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Scalar::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            Scalar::Finite(r) => Some(r),
            _ => None,
        }
    }

    /// `self + d`, with infinities absorbing.
    pub fn add_rat(&self, d: &Rat) -> Scalar {
        match self {
            Scalar::Finite(r) => Scalar::Finite(r + d),
            other => other.clone(),
        }
    }

    /// `self - d`, with infinities absorbing.
    pub fn sub_rat(&self, d: &Rat) -> Scalar {
        match self {
            Scalar::Finite(r) => Scalar::Finite(r - d),
            other => other.clone(),
        }
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::Finite(r)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::NegInf => write!(f, "-inf"),
            Scalar::PosInf => write!(f, "inf"),
            Scalar::Finite(r) => write!(f, "{}", format_rat(r)),
        }
    }
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    match s.trim() {
        "-inf" => Ok(Scalar::NegInf),
        "inf" | "+inf" => Ok(Scalar::PosInf),
        other => Ok(Scalar::Finite(parse_rat(other)?)),
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        parse_scalar(&s).map_err(de::Error::custom)
    }
}

/// A rational representative strictly inside the open interval `(lo, hi)`.
pub fn open_rep(lo: &Scalar, hi: &Scalar) -> Rat {
    match (lo, hi) {
        (Scalar::Finite(a), Scalar::Finite(b)) => (a + b) / rat_int(2),
        (Scalar::NegInf, Scalar::Finite(b)) => b - rat_int(1),
        (Scalar::Finite(a), Scalar::PosInf) => a + rat_int(1),
        (Scalar::NegInf, Scalar::PosInf) => Rat::zero(),
        _ => unreachable!("empty or inverted open interval"),
    }
}
