//! Exact rational arithmetic plus the `"num/den"` wire form used in every
//! JSON report.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// `n` as an exact rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `num/den` as an exact rational. Panics on a zero denominator, so callers
/// validate first when the input is untrusted.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical text form: lowest terms, `-1/2`, integers as `3/1`.
/// This is the only rational syntax reports emit, so round-trips are exact.
pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `a/b`, plain integers `a`, and an optional leading sign.
pub fn rat_from_str(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rat::new(num, den))
}

/// `base^exp` for integer `exp` (negative exponents flip to the reciprocal).
pub fn rat_pow(base: &Rat, exp: i64) -> Rat {
    if exp >= 0 {
        num_traits::pow::pow(base.clone(), exp as usize)
    } else {
        num_traits::pow::pow(base.clone(), (-exp) as usize).recip()
    }
}

/// Serde adapter: (de)serialize a `Rat` as the `"num/den"` string form.
pub mod serde_rat {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        rat_from_str(&s).ok_or_else(|| D::Error::custom(format!("bad rational: {s:?}")))
    }
}

/// Serde adapter for `BTreeMap<K, Rat>` values in report payloads.
pub mod serde_rat_map {
    use super::*;
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer, K: serde::Serialize + Ord>(
        m: &BTreeMap<K, Rat>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(m.len()))?;
        for (k, v) in m {
            map.serialize_entry(k, &rat_to_string(v))?;
        }
        map.end()
    }

    pub fn deserialize<'de, D, K>(d: D) -> Result<BTreeMap<K, Rat>, D::Error>
    where
        D: Deserializer<'de>,
        K: serde::Deserialize<'de> + Ord,
    {
        use serde::de::Error;
        let raw: BTreeMap<K, String> = BTreeMap::deserialize(d)?;
        raw.into_iter()
            .map(|(k, s)| {
                rat_from_str(&s)
                    .map(|r| (k, r))
                    .ok_or_else(|| D::Error::custom(format!("bad rational: {s:?}")))
            })
            .collect()
    }
}

/// Floating approximation for tolerance checks (empirical-vs-exact test
/// comparisons only; never used in verdict arithmetic).
pub fn rat_to_f64(r: &Rat) -> f64 {
    // Scale into i128 range first so huge numerators stay finite.
    let num = r.numer();
    let den = r.denom();
    match (num.to_string().parse::<f64>(), den.to_string().parse::<f64>()) {
        (Ok(n), Ok(d)) if d != 0.0 => n / d,
        _ => {
            if r.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        }
    }
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}
