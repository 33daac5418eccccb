//! JSON numbers with 17 significant digits.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `x` with 17 significant digits, or `None` when it has no JSON form.
pub fn float_literal(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

/// Serializes an `f64` with 17 significant digits; non-finite becomes `null`.
pub fn serialize_f64<S: Serializer>(x: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    match float_literal(*x) {
        Some(text) => RawValue::from_string(text)
            .map_err(serde::ser::Error::custom)?
            .serialize(serializer),
        None => serializer.serialize_none(),
    }
}

/// Newtype carrying the same serialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Float17(pub f64);

impl Serialize for Float17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serialize_f64(&self.0, serializer)
    }
}
