//! Exact rational helpers: parsing/formatting of `p/q` strings, perfect-square
//! tests, rational gcd, and serde adapters for rational fields.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Parse a rational from `"p"` or `"p/q"` form. Whitespace is not accepted.
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// Format a rational as `"p"` or `"p/q"` in lowest terms.
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio_from_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// True iff `n` is the square of an integer (negative numbers are not).
pub fn is_perfect_square(n: &BigInt) -> bool {
    match n.sign() {
        Sign::Minus => false,
        Sign::NoSign => true,
        Sign::Plus => {
            let root = n.sqrt();
            &root * &root == *n
        }
    }
}

/// True iff `r` is the square of a rational number.
///
/// In lowest terms p/q is a rational square exactly when p and q are both
/// perfect squares.
pub fn is_rational_square(r: &BigRational) -> bool {
    !r.is_negative() && is_perfect_square(r.numer()) && is_perfect_square(r.denom())
}

/// Exact square root of a rational square; `None` when `r` is not one.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let pn = r.numer().sqrt();
    let pd = r.denom().sqrt();
    if &pn * &pn == *r.numer() && &pd * &pd == *r.denom() {
        Some(BigRational::new(pn, pd))
    } else {
        None
    }
}

/// Positive rational gcd: the largest rational dividing every input to an
/// integer. Zero entries are ignored; returns `None` if all inputs are zero.
pub fn rational_gcd(values: &[BigRational]) -> Option<BigRational> {
    let mut acc: Option<BigRational> = None;
    for v in values {
        if v.is_zero() {
            continue;
        }
        let v = v.abs();
        acc = Some(match acc {
            None => v,
            // gcd(a/b, c/d) = gcd(ad, cb) / bd
            Some(g) => BigRational::new(
                (g.numer() * v.denom()).gcd(&(v.numer() * g.denom())),
                g.denom() * v.denom(),
            ),
        });
    }
    acc
}

pub fn is_odd_integer(r: &BigRational) -> bool {
    r.is_integer() && r.numer().is_odd()
}

pub fn is_even_integer(r: &BigRational) -> bool {
    r.is_integer() && r.numer().is_even()
}

/// Nonnegative residue of an integer-valued rational modulo `m`.
pub fn mod_residue(r: &BigRational, m: u64) -> Option<u64> {
    if !r.is_integer() {
        return None;
    }
    r.numer().mod_floor(&BigInt::from(m)).to_u64()
}

/// Serde adapter serializing `BigRational` as a `"p/q"` string.
pub mod serde_ratio {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_ratio(&s).ok_or_else(|| D::Error::custom(format!("invalid rational: {s}")))
    }
}

/// Serde adapter for `Vec<BigRational>` as `"p/q"` strings.
pub mod serde_ratio_vec {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_ratio_ref))
    }

    fn format_ratio_ref(r: &BigRational) -> String {
        format_ratio(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        items
            .iter()
            .map(|s| parse_ratio(s).ok_or_else(|| D::Error::custom(format!("invalid rational: {s}"))))
            .collect()
    }
}

/// Serde adapter for `Option<BigRational>`.
pub mod serde_ratio_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref().map(format_ratio).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        use serde::de::Error;
        Option::<String>::deserialize(d)?
            .map(|s| parse_ratio(&s).ok_or_else(|| D::Error::custom(format!("invalid rational: {s}"))))
            .transpose()
    }
}

/// Serde adapter for `Option<Vec<BigRational>>`.
pub mod serde_ratio_vec_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigRational>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => {
                let strings: Vec<String> = v.iter().map(format_ratio).collect();
                Some(strings).serialize(s)
            }
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<Vec<BigRational>>, D::Error> {
        use serde::de::Error;
        let items = Option::<Vec<String>>::deserialize(d)?;
        items
            .map(|items| {
                items
                    .iter()
                    .map(|s| {
                        parse_ratio(s)
                            .ok_or_else(|| D::Error::custom(format!("invalid rational: {s}")))
                    })
                    .collect()
            })
            .transpose()
    }
}
