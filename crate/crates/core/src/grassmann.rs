//! The finite Grassmann algebra Λ_N over the rationals.
//!
//! An element is a finite sum of monomials `c · θ_{i1} θ_{i2} … θ_{ik}` with
//! `1 <= i1 < i2 < … < ik <= N`. Monomials are stored as bitmasks (bit
//! `i - 1` for generator `θ_i`), so `N` is limited to 64. Products follow
//! the Koszul rule: `θ_S · θ_T` vanishes when `S ∩ T ≠ ∅` and otherwise
//! equals `(-1)^k θ_{S ∪ T}` where `k` counts the pairs `s ∈ S, t ∈ T` with
//! `s > t` (the transpositions needed to merge the two ascending words).
//!
//! Every element carries its generator count; mixing elements of different
//! algebras is an error (`checked_*` methods) or a panic (operators).

use crate::rational::{half_binomials, rational_sqrt, to_pq_string, Rational};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use thiserror::Error;

pub const MAX_GENERATORS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("generator counts differ: {0} vs {1}")]
    GeneratorMismatch(usize, usize),
    #[error("generator index {index} outside 1..={count}")]
    GeneratorOutOfRange { index: usize, count: usize },
    #[error("at most {MAX_GENERATORS} generators are supported, got {0}")]
    TooManyGenerators(usize),
    #[error("element is not invertible: zero body")]
    ZeroBody,
    #[error("expected an even element, got {0}")]
    NotEven(ParityClass),
    #[error("body {0} is not the square of a rational")]
    NotRationalSquare(String),
    #[error("body {0} is not positive")]
    NonPositiveBody(String),
    #[error("generator pool exhausted: {0} fresh generators already used")]
    PoolExhausted(usize),
}

/// Parity of a homogeneous element or of a row/column label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(odd: bool) -> Self {
        if odd {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Self {
        Parity::from_bit(!self.is_odd())
    }

    /// `(-1)^{p q}` as an integer.
    pub fn koszul(self, other: Parity) -> i64 {
        if self.is_odd() && other.is_odd() {
            -1
        } else {
            1
        }
    }
}

impl Add for Parity {
    type Output = Parity;

    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.is_odd() != rhs.is_odd())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Result of [`GrassmannElement::parity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityClass {
    Even,
    Odd,
    Mixed,
    Zero,
}

impl ParityClass {
    /// Zero is homogeneous of either parity.
    pub fn admits(self, parity: Parity) -> bool {
        match self {
            ParityClass::Zero => true,
            ParityClass::Even => parity == Parity::Even,
            ParityClass::Odd => parity == Parity::Odd,
            ParityClass::Mixed => false,
        }
    }
}

impl fmt::Display for ParityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityClass::Even => "even",
            ParityClass::Odd => "odd",
            ParityClass::Mixed => "mixed",
            ParityClass::Zero => "zero",
        })
    }
}

fn mask_to_subset(mask: u64) -> Vec<usize> {
    (0..64)
        .filter(|b| mask >> b & 1 == 1)
        .map(|b| b + 1)
        .collect()
}

/// Sign of `θ_S · θ_T` for disjoint `S`, `T`.
fn merge_sign(left: u64, right: u64) -> bool {
    let mut swaps = 0u32;
    let mut rest = right;
    while rest != 0 {
        let t = rest.trailing_zeros();
        rest &= rest - 1;
        // generators of `left` with index above t
        let above = if t == 63 { 0 } else { left >> (t + 1) };
        swaps += above.count_ones();
    }
    swaps % 2 == 1
}

/// Order used for display and serialization: by degree, then lexicographic
/// on the ascending index list.
fn monomial_order(a: u64, b: u64) -> Ordering {
    a.count_ones()
        .cmp(&b.count_ones())
        .then_with(|| a.reverse_bits().cmp(&b.reverse_bits()).reverse())
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrassmannElement {
    generators: usize,
    /// Sorted by mask, no zero coefficients.
    terms: Vec<(u64, Rational)>,
}

impl GrassmannElement {
    pub fn zero(generators: usize) -> Self {
        assert!(
            generators <= MAX_GENERATORS,
            "at most {MAX_GENERATORS} generators are supported"
        );
        GrassmannElement {
            generators,
            terms: Vec::new(),
        }
    }

    pub fn one(generators: usize) -> Self {
        Self::scalar(generators, Rational::one())
    }

    pub fn scalar(generators: usize, value: Rational) -> Self {
        let mut out = Self::zero(generators);
        if !value.is_zero() {
            out.terms.push((0, value));
        }
        out
    }

    pub fn from_int(generators: usize, value: i64) -> Self {
        Self::scalar(generators, crate::rational::int(value))
    }

    /// The generator `θ_index`, `1 <= index <= generators`.
    pub fn generator(generators: usize, index: usize) -> Result<Self, AlgebraError> {
        Self::monomial(generators, &[index], Rational::one())
    }

    /// `coeff · θ_{i1} θ_{i2} …` in the given (not necessarily ascending)
    /// order; the sign is normalized to the ascending order.
    pub fn monomial(
        generators: usize,
        indices: &[usize],
        coeff: Rational,
    ) -> Result<Self, AlgebraError> {
        if generators > MAX_GENERATORS {
            return Err(AlgebraError::TooManyGenerators(generators));
        }
        let mut out = Self::scalar(generators, coeff);
        for &i in indices {
            if i == 0 || i > generators {
                return Err(AlgebraError::GeneratorOutOfRange {
                    index: i,
                    count: generators,
                });
            }
            let g = GrassmannElement {
                generators,
                terms: vec![(1u64 << (i - 1), Rational::one())],
            };
            out = &out * &g;
        }
        Ok(out)
    }

    /// Builds an element from `(ascending subset, coefficient)` pairs.
    pub fn from_terms<I>(generators: usize, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Vec<usize>, Rational)>,
    {
        let mut out = Self::zero(generators);
        for (subset, coeff) in terms {
            out = out.checked_add(&Self::monomial(generators, &subset, coeff)?)?;
        }
        Ok(out)
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms as `(ascending 1-based subset, coefficient)` in display order.
    pub fn terms(&self) -> Vec<(Vec<usize>, Rational)> {
        let mut sorted: Vec<_> = self.terms.iter().collect();
        sorted.sort_by(|a, b| monomial_order(a.0, b.0));
        sorted
            .into_iter()
            .map(|(m, c)| (mask_to_subset(*m), c.clone()))
            .collect()
    }

    /// Coefficient of the monomial with the given ascending subset.
    pub fn coefficient(&self, subset: &[usize]) -> Rational {
        let mask = subset.iter().fold(0u64, |m, &i| m | 1u64 << (i - 1));
        match self.terms.binary_search_by_key(&mask, |t| t.0) {
            Ok(pos) => self.terms[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    /// Union of generators appearing in any term.
    pub fn support(&self) -> u64 {
        self.terms.iter().fold(0, |m, t| m | t.0)
    }

    pub fn parity(&self) -> ParityClass {
        let mut seen_even = false;
        let mut seen_odd = false;
        for (mask, _) in &self.terms {
            if mask.count_ones() % 2 == 0 {
                seen_even = true;
            } else {
                seen_odd = true;
            }
        }
        match (seen_even, seen_odd) {
            (false, false) => ParityClass::Zero,
            (true, false) => ParityClass::Even,
            (false, true) => ParityClass::Odd,
            (true, true) => ParityClass::Mixed,
        }
    }

    pub fn body(&self) -> Rational {
        match self.terms.first() {
            Some((0, c)) => c.clone(),
            _ => Rational::zero(),
        }
    }

    pub fn soul(&self) -> Self {
        GrassmannElement {
            generators: self.generators,
            terms: self.terms.iter().filter(|t| t.0 != 0).cloned().collect(),
        }
    }

    /// `⌊N/2⌋ + 1`: every power of the soul of a homogeneous element at
    /// least this large vanishes.
    pub fn nilpotency_bound(&self) -> usize {
        self.generators / 2 + 1
    }

    fn check_same(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.generators == other.generators {
            Ok(())
        } else {
            Err(AlgebraError::GeneratorMismatch(
                self.generators,
                other.generators,
            ))
        }
    }

    fn merge(&self, other: &Self, negate_other: bool) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let take = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match take {
                Ordering::Less => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let (m, c) = &other.terms[j];
                    terms.push((*m, if negate_other { -c } else { c.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let (m, a) = &self.terms[i];
                    let b = &other.terms[j].1;
                    let c = if negate_other { a - b } else { a + b };
                    if !c.is_zero() {
                        terms.push((*m, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        GrassmannElement {
            generators: self.generators,
            terms,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same(other)?;
        Ok(self.merge(other, true))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.generators));
        }
        let mut acc: BTreeMap<u64, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let prod = ca * cb;
                let entry = acc.entry(ma | mb).or_insert_with(Rational::zero);
                if merge_sign(*ma, *mb) {
                    *entry -= prod;
                } else {
                    *entry += prod;
                }
            }
        }
        Ok(GrassmannElement {
            generators: self.generators,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.generators);
        }
        GrassmannElement {
            generators: self.generators,
            terms: self.terms.iter().map(|(m, c)| (*m, c * factor)).collect(),
        }
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = Self::one(self.generators);
        for _ in 0..exponent {
            out = &out * self;
        }
        out
    }

    pub fn square(&self) -> Self {
        self * self
    }

    fn require_even(&self) -> Result<(), AlgebraError> {
        match self.parity() {
            ParityClass::Even | ParityClass::Zero => Ok(()),
            other => Err(AlgebraError::NotEven(other)),
        }
    }

    /// `Σ_k coeffs[k] · u^k` for nilpotent `u`, stopping once powers vanish.
    fn nilpotent_series(u: &Self, coeffs: impl Iterator<Item = Rational>) -> Self {
        let mut out = Self::zero(u.generators);
        let mut power = Self::one(u.generators);
        for c in coeffs {
            if power.is_zero() {
                break;
            }
            out += &power.scale(&c);
            power = &power * u;
        }
        out
    }

    /// Inverse of an even element with nonzero body:
    /// `b⁻¹ · Σ_{k=0..⌊N/2⌋} (−soul/b)^k`.
    pub fn invert(&self) -> Result<Self, AlgebraError> {
        self.require_even()?;
        let body = self.body();
        if body.is_zero() {
            return Err(AlgebraError::ZeroBody);
        }
        let inv_body = body.recip();
        let u = self.soul().scale(&(-&inv_body));
        let series = Self::nilpotent_series(
            &u,
            std::iter::repeat_n(Rational::one(), self.nilpotency_bound()),
        );
        Ok(series.scale(&inv_body))
    }

    /// Square root with positive rational body, via the finite binomial
    /// series `√b · Σ_k C(1/2, k) (soul/b)^k`.
    pub fn sqrt(&self) -> Result<Self, AlgebraError> {
        self.require_even()?;
        let body = self.body();
        if !body.is_positive() {
            return Err(AlgebraError::NonPositiveBody(to_pq_string(&body)));
        }
        let root = rational_sqrt(&body)
            .ok_or_else(|| AlgebraError::NotRationalSquare(to_pq_string(&body)))?;
        let u = self.soul().scale(&body.recip());
        let series =
            Self::nilpotent_series(&u, half_binomials(self.nilpotency_bound()).into_iter());
        Ok(series.scale(&root))
    }

    /// JSON-friendly term list in display order.
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms()
            .into_iter()
            .map(|(subset, coeff)| TermRecord { subset, coeff })
            .collect()
    }

    pub fn from_records(generators: usize, records: &[TermRecord]) -> Result<Self, AlgebraError> {
        Self::from_terms(
            generators,
            records.iter().map(|r| (r.subset.clone(), r.coeff.clone())),
        )
    }
}

/// Serialized monomial: `{"subset": [1, 3], "coeff": "2/3"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub subset: Vec<usize>,
    #[serde(
        serialize_with = "crate::rational::serialize_pq",
        deserialize_with = "crate::rational::deserialize_pq"
    )]
    pub coeff: Rational,
}

impl Serialize for GrassmannElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_records().serialize(s)
    }
}

impl fmt::Debug for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Λ{}[{}]", self.generators, self)
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (subset, coeff)) in self.terms().into_iter().enumerate() {
            let negative = coeff.is_negative();
            let magnitude = coeff.abs();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if subset.is_empty() {
                write!(f, "{magnitude}")?;
                continue;
            }
            if !magnitude.is_one() {
                write!(f, "{magnitude}·")?;
            }
            for i in subset {
                write!(f, "θ{i}")?;
            }
        }
        Ok(())
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait<&GrassmannElement> for &GrassmannElement {
            type Output = GrassmannElement;

            /// Panics if the generator counts differ.
            fn $method(self, rhs: &GrassmannElement) -> GrassmannElement {
                self.$checked(rhs)
                    .expect(concat!("GrassmannElement::", stringify!($method)))
            }
        }

        impl $trait<GrassmannElement> for GrassmannElement {
            type Output = GrassmannElement;

            fn $method(self, rhs: GrassmannElement) -> GrassmannElement {
                (&self).$method(&rhs)
            }
        }

        impl $trait<&GrassmannElement> for GrassmannElement {
            type Output = GrassmannElement;

            fn $method(self, rhs: &GrassmannElement) -> GrassmannElement {
                (&self).$method(rhs)
            }
        }

        impl $trait<GrassmannElement> for &GrassmannElement {
            type Output = GrassmannElement;

            fn $method(self, rhs: GrassmannElement) -> GrassmannElement {
                self.$method(&rhs)
            }
        }
    };
}

binary_op!(Add, add, checked_add);
binary_op!(Sub, sub, checked_sub);
binary_op!(Mul, mul, checked_mul);

impl AddAssign<&GrassmannElement> for GrassmannElement {
    fn add_assign(&mut self, rhs: &GrassmannElement) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&GrassmannElement> for GrassmannElement {
    fn sub_assign(&mut self, rhs: &GrassmannElement) {
        *self = &*self - rhs;
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;

    fn neg(self) -> GrassmannElement {
        GrassmannElement {
            generators: self.generators,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Neg for GrassmannElement {
    type Output = GrassmannElement;

    fn neg(self) -> GrassmannElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    const N: usize = 6;

    fn th(i: usize) -> GrassmannElement {
        GrassmannElement::generator(N, i).unwrap()
    }

    fn c(v: Rational) -> GrassmannElement {
        GrassmannElement::scalar(N, v)
    }

    fn mono(subset: &[usize], coeff: Rational) -> GrassmannElement {
        GrassmannElement::monomial(N, subset, coeff).unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(&th(1) + &th(1), mono(&[1], int(2)));
        let x = &c(ratio(5, 2)) + &mono(&[2, 4], int(-3));
        assert_eq!(&x + &GrassmannElement::zero(N), x);
        let y = &(&c(int(1)) + &mono(&[1, 2], int(1))) + &c(int(-1));
        assert_eq!(y, mono(&[1, 2], int(1)));
        assert_eq!(y.term_count(), 1);
    }

    #[test]
    fn multiplication_examples() {
        assert_eq!(&th(1) * &th(2), mono(&[1, 2], int(1)));
        assert_eq!(&th(2) * &th(1), mono(&[1, 2], int(-1)));
        assert!((&th(1) * &th(1)).is_zero());
        // θ3 θ1 θ2 = θ1 θ2 θ3 (two transpositions)
        assert_eq!(&(&th(3) * &th(1)) * &th(2), mono(&[1, 2, 3], int(1)));
        assert_eq!(mono(&[3, 1], int(1)), mono(&[1, 3], int(-1)));
    }

    #[test]
    fn mismatched_generator_counts_are_rejected() {
        let a = GrassmannElement::one(3);
        let b = GrassmannElement::one(4);
        assert_eq!(
            a.checked_add(&b),
            Err(AlgebraError::GeneratorMismatch(3, 4))
        );
        assert_eq!(
            a.checked_mul(&b),
            Err(AlgebraError::GeneratorMismatch(3, 4))
        );
        assert!(GrassmannElement::generator(3, 4).is_err());
        assert!(GrassmannElement::generator(3, 0).is_err());
    }

    #[test]
    fn parity_classes() {
        assert_eq!(
            (&c(int(3)) + &mono(&[1, 2], int(1))).parity(),
            ParityClass::Even
        );
        assert_eq!(th(3).parity(), ParityClass::Odd);
        assert_eq!((&c(int(1)) + &th(1)).parity(), ParityClass::Mixed);
        assert_eq!(GrassmannElement::zero(N).parity(), ParityClass::Zero);
    }

    #[test]
    fn body_and_soul() {
        let x = &c(ratio(5, 2)) + &mono(&[1, 2], int(1));
        assert_eq!(x.body(), ratio(5, 2));
        assert_eq!(x.soul(), mono(&[1, 2], int(1)));
        assert_eq!(th(1).body(), int(0));
        assert_eq!(&c(x.body()) + &x.soul(), x);
    }

    #[test]
    fn inversion_examples() {
        assert_eq!(c(int(2)).invert().unwrap(), c(ratio(1, 2)));
        let x = &c(int(1)) + &mono(&[1, 2], int(1));
        assert_eq!(x.invert().unwrap(), &c(int(1)) - &mono(&[1, 2], int(1)));
        assert_eq!(th(1).invert(), Err(AlgebraError::NotEven(ParityClass::Odd)));
        assert_eq!(mono(&[1, 2], int(1)).invert(), Err(AlgebraError::ZeroBody));
        let mixed = &c(int(1)) + &th(1);
        assert_eq!(
            mixed.invert(),
            Err(AlgebraError::NotEven(ParityClass::Mixed))
        );
    }

    #[test]
    fn inversion_with_deep_soul() {
        let x = &(&(&c(ratio(-3, 7)) + &mono(&[1, 2], int(2))) + &mono(&[3, 4], ratio(1, 3)))
            + &mono(&[1, 5, 4, 6], int(5));
        let inv = x.invert().unwrap();
        assert!((&x * &inv).is_one());
        assert!((&inv * &x).is_one());
    }

    #[test]
    fn square_root_examples() {
        let x = &c(ratio(9, 4)) + &mono(&[1, 2], int(1));
        let root = x.sqrt().unwrap();
        // oracle: square the candidate and compare with the input
        assert_eq!(&root * &root, x);
        assert_eq!(root, &c(ratio(3, 2)) + &mono(&[1, 2], ratio(1, 3)));
        assert_eq!(c(int(1)).sqrt().unwrap(), c(int(1)));
        assert!(matches!(
            c(int(2)).sqrt(),
            Err(AlgebraError::NotRationalSquare(_))
        ));
        assert!(matches!(
            c(int(-4)).sqrt(),
            Err(AlgebraError::NonPositiveBody(_))
        ));
        assert!(matches!(th(2).sqrt(), Err(AlgebraError::NotEven(_))));
    }

    #[test]
    fn display_and_records() {
        let x = &(&c(ratio(-1, 2)) + &mono(&[2, 1], int(3))) + &th(4);
        assert_eq!(x.to_string(), "-1/2 + θ4 - 3·θ1θ2");
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(
            json,
            r#"[{"subset":[],"coeff":"-1/2"},{"subset":[4],"coeff":"1/1"},{"subset":[1,2],"coeff":"-3/1"}]"#
        );
        let records: Vec<TermRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(GrassmannElement::from_records(N, &records).unwrap(), x);
    }
}
