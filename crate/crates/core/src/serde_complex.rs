//! `[re, im]` pair encoding for complex numbers in JSON.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn to_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn from_pair(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    to_pair(*z).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
    <[f64; 2]>::deserialize(d).map(from_pair)
}

/// Fixed-size arrays of complex numbers.
pub mod array {
    use super::*;

    pub fn serialize<S: Serializer, const N: usize>(
        zs: &[Complex64; N],
        s: S,
    ) -> Result<S::Ok, S::Error> {
        zs.iter().map(|z| to_pair(*z)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>, const N: usize>(
        d: D,
    ) -> Result<[Complex64; N], D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        let n = pairs.len();
        let zs: Vec<Complex64> = pairs.into_iter().map(from_pair).collect();
        zs.try_into().map_err(|_| {
            serde::de::Error::invalid_length(n, &format!("{N} complex numbers").as_str())
        })
    }
}
