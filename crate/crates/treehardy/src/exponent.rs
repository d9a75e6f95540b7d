//! The exponent parameter `p` of a `T_p` space: a positive real or the
//! distinguished infinity token. Values in `(0, 1)` are allowed and induce
//! quasi-norms.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    /// A finite exponent, strictly positive. Construct through
    /// [`Exponent::finite`] or [`Exponent::parse`] to keep the invariant.
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub const INF: Exponent = Exponent::Infinity;

    pub fn finite(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Exponent::Finite(value))
        } else {
            Err(Error::InvalidExponent(value.to_string()))
        }
    }

    /// Parses a decimal literal or the token `inf` (case-insensitive).
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("inf") {
            return Ok(Exponent::Infinity);
        }
        let value: f64 = t
            .parse()
            .map_err(|_| Error::InvalidExponent(text.to_string()))?;
        Exponent::finite(value)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    /// The finite value, if any.
    pub fn value(self) -> Option<f64> {
        match self {
            Exponent::Finite(v) => Some(v),
            Exponent::Infinity => None,
        }
    }

    /// `1/p`, with the convention `1/inf = 0`.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(v) => v.recip(),
            Exponent::Infinity => 0.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(v) => serializer.serialize_f64(*v),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExponentVisitor;

        impl Visitor<'_> for ExponentVisitor {
            type Value = Exponent;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v as f64).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Exponent, E> {
                Exponent::finite(v as f64).map_err(E::custom)
            }

            fn visit_str<E: de::Error>(self, s: &str) -> std::result::Result<Exponent, E> {
                Exponent::parse(s).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(ExponentVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_decimals_and_inf() {
        assert_eq!(Exponent::parse("2").unwrap(), Exponent::Finite(2.0));
        assert_eq!(Exponent::parse("0.5").unwrap(), Exponent::Finite(0.5));
        assert_eq!(Exponent::parse("inf").unwrap(), Exponent::Infinity);
        assert_eq!(Exponent::parse("INF").unwrap(), Exponent::Infinity);
        assert!(Exponent::parse("0").is_err());
        assert!(Exponent::parse("-1").is_err());
        assert!(Exponent::parse("nan").is_err());
        assert!(Exponent::parse("").is_err());
    }

    #[test]
    fn recip_convention() {
        assert_eq!(Exponent::Infinity.recip(), 0.0);
        assert_eq!(Exponent::Finite(4.0).recip(), 0.25);
    }

    #[test]
    fn serde_round_trip() {
        let p: Exponent = serde_json::from_str("2.5").unwrap();
        assert_eq!(p, Exponent::Finite(2.5));
        assert_eq!(serde_json::to_string(&p).unwrap(), "2.5");
        let q: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(q, Exponent::Infinity);
        assert_eq!(serde_json::to_string(&q).unwrap(), "\"inf\"");
    }
}
