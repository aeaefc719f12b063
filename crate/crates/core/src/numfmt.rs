//! Decimal string encodings for big integers and rationals in JSON.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serializer};

pub fn rat_to_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_bigint(s: &str) -> Result<BigInt, String> {
    s.trim().parse::<BigInt>().map_err(|_| format!("not an integer: {s:?}"))
}

pub fn parse_rat(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_bigint(s)?)),
        Some((n, d)) => {
            let d = parse_bigint(d)?;
            if d.is_zero() {
                return Err(format!("zero denominator in {s:?}"));
            }
            Ok(BigRational::new(parse_bigint(n)?, d))
        }
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Either a JSON string or a JSON integer.
#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrStr {
    Int(i64),
    Str(String),
}

pub mod big {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        match NumOrStr::deserialize(d)? {
            NumOrStr::Int(i) => Ok(BigInt::from(i)),
            NumOrStr::Str(s) => parse_bigint(&s).map_err(de::Error::custom),
        }
    }
}

pub mod big_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw: Vec<NumOrStr> = Vec::deserialize(d)?;
        raw.into_iter()
            .map(|x| match x {
                NumOrStr::Int(i) => Ok(BigInt::from(i)),
                NumOrStr::Str(s) => parse_bigint(&s).map_err(de::Error::custom),
            })
            .collect()
    }
}

pub mod big_matrix {
    use super::*;

    #[derive(serde::Serialize, Deserialize)]
    struct RowW(#[serde(with = "super::big_vec")] Vec<BigInt>);

    pub fn serialize<S: Serializer>(rows: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
        let w: Vec<RowW> = rows.iter().cloned().map(RowW).collect();
        serde::Serialize::serialize(&w, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
        let w: Vec<RowW> = Vec::deserialize(d)?;
        Ok(w.into_iter().map(|r| r.0).collect())
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        match NumOrStr::deserialize(d)? {
            NumOrStr::Int(i) => Ok(BigRational::from_integer(BigInt::from(i))),
            NumOrStr::Str(s) => parse_rat(&s).map_err(de::Error::custom),
        }
    }
}
