//! Serde helpers for exact integers.

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

/// Write a [`BigInt`] as a JSON number without loss of precision.
pub fn bigint_as_number<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    serde_json::Number::from_str(&x.to_string())
        .expect("integers are valid JSON numbers")
        .serialize(s)
}
