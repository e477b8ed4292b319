//! JSON encodings: integers as decimal strings, rationals as "num/den".

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serializer};

pub fn rational_to_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| format!("bad rational {s:?}"))?;
    let d: BigInt = d.parse().map_err(|_| format!("bad rational {s:?}"))?;
    if d == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(n, d))
}

pub fn parse_bigint(s: &str) -> Result<BigInt, String> {
    s.trim().parse().map_err(|_| format!("bad integer {s:?}"))
}

/// Comma separated integer list, e.g. "-1,1,1,35,5".
pub fn parse_bigint_list(s: &str) -> Result<Vec<BigInt>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_bigint)
        .collect()
}

pub fn parse_rational_list(s: &str) -> Result<Vec<BigRational>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(parse_rational)
        .collect()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Str(String),
    Num(i64),
}

impl IntRepr {
    fn into_bigint<E: serde::de::Error>(self) -> Result<BigInt, E> {
        match self {
            IntRepr::Str(s) => parse_bigint(&s).map_err(E::custom),
            IntRepr::Num(n) => Ok(BigInt::from(n)),
        }
    }
}

pub mod bigint_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        IntRepr::deserialize(d)?.into_bigint()
    }
}

pub mod bigint_vec_str {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<IntRepr>::deserialize(d)?
            .into_iter()
            .map(IntRepr::into_bigint)
            .collect()
    }
}

pub mod opt_bigint_vec_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => bigint_vec_str::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        let v = Option::<Vec<IntRepr>>::deserialize(d)?;
        v.map(|v| v.into_iter().map(IntRepr::into_bigint).collect())
            .transpose()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RatRepr {
    Str(String),
    Num(i64),
}

impl RatRepr {
    fn into_rational<E: serde::de::Error>(self) -> Result<BigRational, E> {
        match self {
            RatRepr::Str(s) => parse_rational(&s).map_err(E::custom),
            RatRepr::Num(n) => Ok(BigRational::new(BigInt::from(n), BigInt::one())),
        }
    }
}

pub mod rational_vec_str {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&rational_to_string(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<RatRepr>::deserialize(d)?
            .into_iter()
            .map(RatRepr::into_rational)
            .collect()
    }
}

pub mod rational_matrix_str {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for row in v {
            let r: Vec<String> = row.iter().map(rational_to_string).collect();
            seq.serialize_element(&r)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
        Vec::<Vec<RatRepr>>::deserialize(d)?
            .into_iter()
            .map(|r| r.into_iter().map(RatRepr::into_rational).collect())
            .collect()
    }
}

pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational_to_string(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        RatRepr::deserialize(d)?.into_rational()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roundtrip() {
        let r = parse_rational("-6/4").unwrap();
        assert_eq!(rational_to_string(&r), "-3/2");
        assert_eq!(rational_to_string(&parse_rational("7").unwrap()), "7/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn list_parsing() {
        let v = parse_bigint_list("-1,1, 1,35,5").unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v[3], BigInt::from(35));
    }
}
