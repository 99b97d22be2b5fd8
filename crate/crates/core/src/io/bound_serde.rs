//! Variable bounds as JSON: finite values are numbers, infinities are the
//! strings `"inf"` and `"-inf"`.

use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};
use std::fmt;

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else if *v < 0.0 {
        s.serialize_str("-inf")
    } else {
        Err(serde::ser::Error::custom("NaN bound"))
    }
}

struct BoundVisitor;

impl Visitor<'_> for BoundVisitor {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number, \"inf\" or \"-inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        match v {
            "inf" | "+inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
        }
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    d.deserialize_any(BoundVisitor)
}

#[cfg(test)]
mod tests {
    use crate::model::Variable;

    #[test]
    fn infinite_bounds_round_trip() {
        let v = Variable::continuous("z", f64::NEG_INFINITY, f64::INFINITY);
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"-inf\"") && s.contains("\"inf\""), "{s}");
        assert_eq!(serde_json::from_str::<Variable>(&s).unwrap(), v);
    }

    #[test]
    fn rejects_other_strings() {
        let s = r#"{"name":"z","lower":"nan","upper":1,"kind":"continuous"}"#;
        assert!(serde_json::from_str::<Variable>(s).is_err());
    }
}
