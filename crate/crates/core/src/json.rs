//! Complex numbers travel through JSON as `[re, im]` pairs.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// `#[serde(with = "complex_pair")]` for a single `Complex64`.
pub mod complex_pair {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, ser: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Complex64, D::Error> {
        let pair = <[f64; 2]>::deserialize(de)?;
        if !(pair[0].is_finite() && pair[1].is_finite()) {
            return Err(D::Error::custom("complex components must be finite"));
        }
        Ok(Complex64::new(pair[0], pair[1]))
    }
}

/// `#[serde(with = "complex_vec")]` for `Vec<Complex64>`.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], ser: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(de)?;
        Ok(pairs.into_iter().map(|p| Complex64::new(p[0], p[1])).collect())
    }
}

/// Nested `[[ [re, im], ... ], ...]` rows.
pub fn matrix_to_json(rows: &[Vec<Complex64>]) -> serde_json::Value {
    serde_json::Value::Array(
        rows.iter()
            .map(|row| {
                serde_json::Value::Array(row.iter().map(|z| pair_value(*z)).collect())
            })
            .collect(),
    )
}

pub fn pair_value(z: Complex64) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}
