//! Exact rational coefficients.
//!
//! [`Rational`] is `num_rational::BigRational`, which keeps numerator and
//! denominator reduced with a positive denominator. This module adds the
//! `"p/q"` text encoding used by every JSON report and a couple of
//! number-theoretic helpers.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};
use std::str::FromStr;

pub type Rational = num_rational::BigRational;

/// Builds `num/den` from machine integers. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Always `"p/q"`, including integers (`"3/1"`) and zero (`"0/1"`).
pub fn to_pq_string(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn parse_pq(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).map_err(|e| format!("bad numerator {num:?}: {e}"))?;
    let den = BigInt::from_str(den).map_err(|e| format!("bad denominator {den:?}: {e}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(Rational::new(num, den))
}

/// Square root of a non-negative integer if it is a perfect square.
fn exact_isqrt(value: &BigInt) -> Option<BigInt> {
    if value.is_negative() {
        return None;
    }
    let root = value.sqrt();
    (&root * &root == *value).then_some(root)
}

/// The positive rational square root of `value`, if one exists.
pub fn rational_sqrt(value: &Rational) -> Option<Rational> {
    if !value.is_positive() {
        return if value.is_zero() {
            Some(Rational::zero())
        } else {
            None
        };
    }
    let num = exact_isqrt(value.numer())?;
    let den = exact_isqrt(value.denom())?;
    Some(Rational::new(num, den))
}

/// Generalized binomial coefficients `C(1/2, k)` for `k = 0..=count-1`.
pub fn half_binomials(count: usize) -> Vec<Rational> {
    let half = ratio(1, 2);
    let mut out = Vec::with_capacity(count);
    let mut c = Rational::one();
    for k in 0..count {
        out.push(c.clone());
        c = c * (&half - int(k as i64)) / int(k as i64 + 1);
    }
    out
}

pub fn serialize_pq<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&to_pq_string(value))
}

pub fn deserialize_pq<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let text = String::deserialize(d)?;
    parse_pq(&text).map_err(D::Error::custom)
}
