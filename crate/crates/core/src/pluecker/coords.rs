//! Plücker coordinates as Berezinians of column selections.

use super::{join_indices, ColIndex, PlaneRep, PlueckerError};
use crate::grassmann::{GrassmannElement, Parity};
use crate::supermatrix::{MatrixError, SuperMatrix};
use itertools::Itertools;
use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// `Ber(U·P)`.
pub fn pl_eval(plane: &PlaneRep, p: &SuperMatrix) -> Result<GrassmannElement, PlueckerError> {
    Ok(plane.matrix().mul(p)?.ber()?)
}

/// `Ber*(U·P)`.
pub fn pl_star_eval(plane: &PlaneRep, p: &SuperMatrix) -> Result<GrassmannElement, PlueckerError> {
    Ok(plane.matrix().mul(p)?.ber_star()?)
}

/// The `(n+m)×(r+s)` matrix of basis covectors `e^{c1}, …, e^{c_{r+s}}`,
/// first `r` in even slots. Covectors of the wrong parity for their slot
/// make wrong columns.
pub fn basis_covectors(
    plane: &PlaneRep,
    columns: &[ColIndex],
) -> Result<SuperMatrix, PlueckerError> {
    let (r, s, n, m) = plane.dims();
    if columns.len() != r + s {
        return Err(PlueckerError::Shape(format!(
            "{} covectors for a {r}|{s} plane",
            columns.len()
        )));
    }
    let g = plane.generators();
    let mut entries = vec![vec![GrassmannElement::zero(g); r + s]; n + m];
    let mut wrong = BTreeSet::new();
    for (k, c) in columns.iter().enumerate() {
        entries[c.position(n)][k] = GrassmannElement::one(g);
        let slot = if k < r { Parity::Even } else { Parity::Odd };
        if c.parity() != slot {
            wrong.insert(k);
        }
    }
    Ok(SuperMatrix::with_wrong(
        SuperMatrix::standard_labels(n, m),
        SuperMatrix::standard_labels(r, s),
        BTreeSet::new(),
        wrong,
        entries,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordFamily {
    /// `Ber U^{a|μ}`, even.
    Even,
    /// `Ber* U^{a|μ}`, even.
    Star,
    /// `Ber U^{a(a_j←ν)|μ}`, odd.
    OddSubstituted,
    /// `Ber* U^{a|μ(μ_β←b)}`, odd.
    StarSubstituted,
}

impl CoordFamily {
    pub fn expected_parity(self) -> Parity {
        match self {
            CoordFamily::Even | CoordFamily::Star => Parity::Even,
            _ => Parity::Odd,
        }
    }

    fn uses_star(self) -> bool {
        matches!(self, CoordFamily::Star | CoordFamily::StarSubstituted)
    }
}

/// Columns placed in the `r` even slots and the `s` odd slots.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoordKey {
    pub even_slots: Vec<ColIndex>,
    pub odd_slots: Vec<ColIndex>,
}

impl CoordKey {
    pub fn new(even_slots: Vec<ColIndex>, odd_slots: Vec<ColIndex>) -> Self {
        CoordKey {
            even_slots,
            odd_slots,
        }
    }

    pub fn columns(&self) -> Vec<ColIndex> {
        self.even_slots
            .iter()
            .chain(&self.odd_slots)
            .copied()
            .collect()
    }

    pub fn label(&self, family: CoordFamily) -> String {
        let prefix = if family.uses_star() { "T*" } else { "T" };
        format!(
            "{prefix}[{}|{}]",
            join_indices(&self.even_slots),
            join_indices(&self.odd_slots)
        )
    }
}

impl fmt::Display for CoordKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}|{}]",
            join_indices(&self.even_slots),
            join_indices(&self.odd_slots)
        )
    }
}

/// A coordinate value, or the reason it is not defined in this chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoordValue {
    Defined(GrassmannElement),
    Undefined(String),
}

impl CoordValue {
    pub fn defined(&self) -> Option<&GrassmannElement> {
        match self {
            CoordValue::Defined(v) => Some(v),
            CoordValue::Undefined(_) => None,
        }
    }
}

impl Serialize for CoordValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CoordValue::Defined(v) => v.serialize(s),
            CoordValue::Undefined(_) => s.serialize_str("undefined"),
        }
    }
}

/// All four coordinate families of a plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlueckerCoordSet {
    pub even_t: BTreeMap<CoordKey, CoordValue>,
    pub star_t: BTreeMap<CoordKey, CoordValue>,
    pub odd_t: BTreeMap<CoordKey, CoordValue>,
    pub odd_star_t: BTreeMap<CoordKey, CoordValue>,
}

impl Serialize for PlueckerCoordSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let families = [
            (CoordFamily::Even, &self.even_t),
            (CoordFamily::Star, &self.star_t),
            (CoordFamily::OddSubstituted, &self.odd_t),
            (CoordFamily::StarSubstituted, &self.odd_star_t),
        ];
        s.collect_map(
            families
                .into_iter()
                .flat_map(|(family, map)| map.iter().map(move |(k, v)| (k.label(family), v))),
        )
    }
}

fn evens(items: &[usize]) -> Vec<ColIndex> {
    items.iter().map(|&a| ColIndex::Even(a)).collect()
}

fn odds(items: &[usize]) -> Vec<ColIndex> {
    items.iter().map(|&mu| ColIndex::Odd(mu)).collect()
}

impl PlueckerCoordSet {
    /// Evaluates every coordinate. Keys whose Berezinian is undefined (a
    /// non-invertible block) are kept as [`CoordValue::Undefined`]; a
    /// defined value of the wrong parity is an error.
    pub fn compute(plane: &PlaneRep) -> Result<Self, PlueckerError> {
        let (r, s, n, m) = plane.dims();
        let mut main_keys = Vec::new();
        for a in (1..=n).combinations(r) {
            for mu in (1..=m).combinations(s) {
                main_keys.push(CoordKey::new(evens(&a), odds(&mu)));
            }
        }
        let mut odd_keys = Vec::new();
        if r > 0 {
            for a in (1..=n).combinations(r - 1) {
                for nu in 1..=m {
                    for mu in (1..=m).combinations(s) {
                        let mut slots = evens(&a);
                        slots.push(ColIndex::Odd(nu));
                        odd_keys.push(CoordKey::new(slots, odds(&mu)));
                    }
                }
            }
        }
        let mut star_odd_keys = Vec::new();
        if s > 0 {
            for a in (1..=n).combinations(r) {
                for mu in (1..=m).combinations(s - 1) {
                    for b in 1..=n {
                        let mut slots = odds(&mu);
                        slots.push(ColIndex::Even(b));
                        star_odd_keys.push(CoordKey::new(evens(&a), slots));
                    }
                }
            }
        }
        Ok(PlueckerCoordSet {
            even_t: evaluate(plane, &main_keys, CoordFamily::Even)?,
            star_t: evaluate(plane, &main_keys, CoordFamily::Star)?,
            odd_t: evaluate(plane, &odd_keys, CoordFamily::OddSubstituted)?,
            odd_star_t: evaluate(plane, &star_odd_keys, CoordFamily::StarSubstituted)?,
        })
    }

    pub fn family(&self, family: CoordFamily) -> &BTreeMap<CoordKey, CoordValue> {
        match family {
            CoordFamily::Even => &self.even_t,
            CoordFamily::Star => &self.star_t,
            CoordFamily::OddSubstituted => &self.odd_t,
            CoordFamily::StarSubstituted => &self.odd_star_t,
        }
    }

    pub fn undefined_count(&self) -> usize {
        [&self.even_t, &self.star_t, &self.odd_t, &self.odd_star_t]
            .iter()
            .flat_map(|m| m.values())
            .filter(|v| v.defined().is_none())
            .count()
    }
}

/// One coordinate of the given family at `key`.
pub fn coordinate(
    plane: &PlaneRep,
    key: &CoordKey,
    family: CoordFamily,
) -> Result<CoordValue, PlueckerError> {
    let sel = plane.select(&key.columns())?;
    let value = if family.uses_star() {
        sel.ber_star()
    } else {
        sel.ber()
    };
    match value {
        Ok(v) => {
            let found = v.parity();
            let expected = family.expected_parity();
            if !found.admits(expected) {
                return Err(PlueckerError::CoordParity {
                    key: key.label(family),
                    expected,
                    found,
                });
            }
            Ok(CoordValue::Defined(v))
        }
        Err(e @ (MatrixError::BlockNotInvertible(_) | MatrixError::Singular)) => {
            Ok(CoordValue::Undefined(e.to_string()))
        }
        Err(e) => Err(e.into()),
    }
}

fn evaluate(
    plane: &PlaneRep,
    keys: &[CoordKey],
    family: CoordFamily,
) -> Result<BTreeMap<CoordKey, CoordValue>, PlueckerError> {
    use rayon::prelude::*;
    let values: Vec<CoordValue> = keys
        .par_iter()
        .map(|k| coordinate(plane, k, family))
        .collect::<Result<_, _>>()?;
    Ok(keys.iter().cloned().zip(values).collect())
}
