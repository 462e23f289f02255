//! Fixed-precision numbers for reports.

use std::fmt;

use cepgeo_core::ComplexScalar as C;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Significant digits kept in every emitted float.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to [`SIGNIFICANT_DIGITS`] and maps `-0` to `0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// A float serialized at [`SIGNIFICANT_DIGITS`]; non-finite values become
/// `null` and read back as NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Self(x)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(round_sig(self.0))
        } else {
            s.serialize_none()
        }
    }
}

struct NumVisitor;

impl<'de> Visitor<'de> for NumVisitor {
    type Value = Num;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or null")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
        Ok(Num(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
        Ok(Num(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
        Ok(Num(v as f64))
    }

    fn visit_unit<E: de::Error>(self) -> Result<Num, E> {
        Ok(Num(f64::NAN))
    }

    fn visit_none<E: de::Error>(self) -> Result<Num, E> {
        Ok(Num(f64::NAN))
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(NumVisitor)
    }
}

/// `{"re": .., "im": ..}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cx {
    pub re: Num,
    pub im: Num,
}

impl From<C> for Cx {
    fn from(z: C) -> Self {
        Self {
            re: Num(z.re),
            im: Num(z.im),
        }
    }
}

impl From<Cx> for C {
    fn from(z: Cx) -> Self {
        C::new(z.re.0, z.im.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounds_to_twelve_digits() {
        assert_eq!(serde_json::to_string(&Num(4.0 / 3.0)).unwrap(), "1.33333333333");
        assert_eq!(serde_json::to_string(&Num(-16.0 / 9.0)).unwrap(), "-1.77777777778");
        assert_eq!(serde_json::to_string(&Num(-0.0)).unwrap(), "0.0");
        assert_eq!(serde_json::to_string(&Num(1e-300 / 3.0)).unwrap(), "3.33333333333e-301");
        assert_eq!(serde_json::to_string(&Num(f64::NAN)).unwrap(), "null");
    }

    #[test]
    fn rounding_is_idempotent() {
        for x in [0.1, 2.0 / 3.0, 123456.789012345, -7.5e-12, 1e300] {
            assert_eq!(round_sig(round_sig(x)), round_sig(x));
            let back: Num = serde_json::from_str(&serde_json::to_string(&Num(x)).unwrap()).unwrap();
            assert_eq!(back.0, round_sig(x));
        }
    }
}
