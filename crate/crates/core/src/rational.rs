//! Exact rational scalars and the small helpers the rest of the crate needs.
//!
//! Everything numeric in the solver path (LP values, capacities, costs) is a
//! [`Rational`]; floating point never enters the core.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn is_integral(v: &Rational) -> bool {
    v.is_integer()
}

/// Converts an integral rational to `u64`. `None` for fractional or negative values.
pub fn to_u64(v: &Rational) -> Option<u64> {
    if !v.is_integer() || v.is_negative() {
        return None;
    }
    v.to_integer().to_u64()
}

pub fn from_u64(v: u64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

/// `Σ a·b` over the pairs. Accumulates in `i128` while everything fits and
/// switches to big rationals otherwise.
pub fn dot<'a>(pairs: impl IntoIterator<Item = (&'a Rational, &'a Rational)>) -> Rational {
    let (mut num, mut den) = (0i128, 1i128);
    let mut big: Option<Rational> = None;
    for (a, b) in pairs {
        if let Some(total) = &mut big {
            *total += a * b;
            continue;
        }
        match small_product(a, b).and_then(|(n, d)| add_small(num, den, n, d)) {
            Some((n, d)) => (num, den) = (n, d),
            None => big = Some(Rational::new(BigInt::from(num), BigInt::from(den)) + a * b),
        }
    }
    big.unwrap_or_else(|| Rational::new(BigInt::from(num), BigInt::from(den)))
}

fn small(v: &BigInt) -> Option<i128> {
    v.to_i64().map(i128::from)
}

fn small_product(a: &Rational, b: &Rational) -> Option<(i128, i128)> {
    let n = small(a.numer())?.checked_mul(small(b.numer())?)?;
    let d = small(a.denom())?.checked_mul(small(b.denom())?)?;
    Some((n, d))
}

fn add_small(n1: i128, d1: i128, n2: i128, d2: i128) -> Option<(i128, i128)> {
    if d1 == d2 {
        return Some((n1.checked_add(n2)?, d1));
    }
    let g = d1.gcd(&d2);
    let l = (d1 / g).checked_mul(d2)?;
    let n = n1
        .checked_mul(l / d1)?
        .checked_add(n2.checked_mul(l / d2)?)?;
    let r = n.gcd(&l).max(1);
    Some((n / r, l / r))
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-2.375"`. Decimals
/// are converted exactly.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, fraction)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits_ok = |d: &str| d.chars().all(|c| c.is_ascii_digit());
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !digits_ok(whole_digits)
            || !digits_ok(fraction)
            || (whole_digits.is_empty() && fraction.is_empty())
        {
            return Err(err());
        }
        let mut digits = String::with_capacity(whole_digits.len() + fraction.len() + 1);
        if negative {
            digits.push('-');
        }
        digits.push_str(if whole_digits.is_empty() {
            "0"
        } else {
            whole_digits
        });
        digits.push_str(fraction);
        let num = BigInt::from_str(&digits).map_err(|_| err())?;
        let den = num_traits::pow(BigInt::from(10), fraction.len());
        return Ok(Rational::new(num, den));
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| err())
}

/// Lossless text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(v: &Rational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn floor(v: &Rational) -> Rational {
    v.floor()
}

pub fn ceil(v: &Rational) -> Rational {
    v.ceil()
}

/// Least common multiple of the denominators; handy for tests that want to
/// scale a vector to integers.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Serde adapters that write rationals as `"p/q"` strings.
pub mod serde_text {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&format_rational(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts
                .iter()
                .map(|t| parse_rational(t).map_err(D::Error::custom))
                .collect()
        }

        pub mod option {
            use super::super::{format_rational, parse_rational, Rational};
            use serde::{de::Error, Deserialize, Deserializer, Serializer};

            pub fn serialize<S: Serializer>(
                v: &Option<Vec<Rational>>,
                s: S,
            ) -> Result<S::Ok, S::Error> {
                match v {
                    Some(xs) => {
                        s.serialize_some(&xs.iter().map(format_rational).collect::<Vec<_>>())
                    }
                    None => s.serialize_none(),
                }
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(
                d: D,
            ) -> Result<Option<Vec<Rational>>, D::Error> {
                let texts = Option::<Vec<String>>::deserialize(d)?;
                texts
                    .map(|ts| {
                        ts.iter()
                            .map(|t| parse_rational(t).map_err(D::Error::custom))
                            .collect()
                    })
                    .transpose()
            }
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => s.serialize_some(&format_rational(x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            let text = Option::<String>::deserialize(d)?;
            text.map(|t| parse_rational(&t).map_err(D::Error::custom))
                .transpose()
        }
    }
}
