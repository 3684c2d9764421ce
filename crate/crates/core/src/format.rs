//! Number formatting shared by the CSV and JSON writers.
//!
//! Every float is written with 17 significant digits, which round-trips any
//! `f64` exactly.

use serde::{Serialize, Serializer};

/// `x` with 17 significant digits in scientific notation.
pub fn sig17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Serializes as a JSON number with 17 significant digits (`null` when not
/// finite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let number: serde_json::Number =
            sig17(self.0).parse().map_err(|e| serde::ser::Error::custom(format!("{e}")))?;
        number.serialize(serializer)
    }
}

/// For `#[serde(serialize_with = "...")]` on plain `f64` fields.
pub fn ser_f64<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    Sig17(*x).serialize(serializer)
}

pub fn ser_opt_f64<S: Serializer>(x: &Option<f64>, serializer: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => Sig17(*v).serialize(serializer),
        None => serializer.serialize_none(),
    }
}

pub fn ser_vec_f64<S: Serializer>(xs: &[f64], serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_seq(xs.iter().map(|&x| Sig17(x)))
}
