//! Exact rationals and their canonical `"p/q"` text form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use thiserror::Error;

/// The only scalar type used by the library.
pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("malformed rational {0:?}")]
pub struct RatParseError(pub String);

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// `2^-e`.
pub fn half_pow(e: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << e)
}

/// `2^e`.
pub fn two_pow(e: u32) -> Q {
    Q::from_integer(BigInt::one() << e)
}

pub fn pow(x: &Q, e: u32) -> Q {
    let mut acc = Q::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

pub fn max_abs<'a>(xs: impl IntoIterator<Item = &'a Q>) -> Q {
    xs.into_iter().map(|x| x.abs()).fold(Q::zero(), |a, b| if b > a { b } else { a })
}

pub fn sum_abs<'a>(xs: impl IntoIterator<Item = &'a Q>) -> Q {
    xs.into_iter().fold(Q::zero(), |a, b| a + b.abs())
}

pub fn min(a: Q, b: Q) -> Q {
    if a <= b {
        a
    } else {
        b
    }
}

/// Integer value when the rational is integral and fits.
pub fn to_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

/// lcm of the denominators; 1 for an empty input.
pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Q>) -> BigInt {
    xs.into_iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
}

pub fn fmt(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse(s: &str) -> Result<Q, RatParseError> {
    let bad = || RatParseError(s.to_string());
    let int = |t: &str| -> Result<BigInt, RatParseError> {
        let t = t.strip_prefix('+').unwrap_or(t);
        if t.is_empty() || t.starts_with('+') {
            return Err(bad());
        }
        t.parse::<BigInt>().map_err(|_| bad())
    };
    match s.split_once('/') {
        None => Ok(Q::from_integer(int(s)?)),
        Some((p, d)) => {
            let d = int(d)?;
            if d.is_zero() || d.is_negative() {
                return Err(bad());
            }
            Ok(Q::new(int(p)?, d))
        }
    }
}

/// Lossy conversion for human-facing summaries only.
pub fn approx(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_q_opt {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&fmt(v)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| parse(&s).map_err(serde::de::Error::custom)).transpose()
    }
}

pub mod serde_qvec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&fmt(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse(s).map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text() {
        assert_eq!(fmt(&q(6, -4)), "-3/2");
        assert_eq!(fmt(&q(8, 4)), "2");
        assert_eq!(parse("-3/2").unwrap(), q(-3, 2));
        assert_eq!(parse("10/4").unwrap(), q(5, 2));
        assert_eq!(parse("+7").unwrap(), qi(7));
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1/0", "1/-2", "a/b", "1//2", "1.5", "/3", "++1"] {
            assert!(parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn lcm_of_denominators() {
        assert_eq!(lcm_denoms(&[q(1, 2), q(1, 3), qi(4)]), BigInt::from(6));
    }
}
