//! Super Plücker coordinates of planes and the relations between them.
//!
//! A plane of dimension `r|s` in `n|m`-space is given by an even
//! `(r+s)×(n+m)` matrix `U` whose rows span it. Columns are addressed by
//! [`ColIndex`]: `Even(a)` for `a = 1..=n` and `Odd(μ)` for `μ = 1..=m`
//! (written `^μ`).

mod coords;
mod reduced;
mod wedge;

pub use coords::{
    basis_covectors, coordinate, pl_eval, pl_star_eval, CoordFamily, CoordKey, CoordValue,
    PlueckerCoordSet,
};
pub use reduced::{
    p_coordinate, scaling_covariance, theta_by_definition, theta_by_determinants, ReducedCoordsR1,
    ThetaKey,
};
pub use wedge::{Gr20Coords, Multivector};

use crate::grassmann::{AlgebraError, GrassmannElement, Parity};
use crate::sample::Sampler;
use crate::supermatrix::{MatrixError, SuperMatrix};
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlueckerError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("coordinate {0} is not invertible")]
    NotInvertible(String),
    #[error("coordinate {key} has parity {found}, expected {expected}")]
    CoordParity {
        key: String,
        expected: Parity,
        found: crate::grassmann::ParityClass,
    },
    #[error("no generic plane found after {0} attempts")]
    SamplingFailed(usize),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Column of the ambient `n|m` space. Even columns sort before odd ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ColIndex {
    Even(usize),
    Odd(usize),
}

impl ColIndex {
    pub fn parity(self) -> Parity {
        match self {
            ColIndex::Even(_) => Parity::Even,
            ColIndex::Odd(_) => Parity::Odd,
        }
    }

    pub fn is_odd(self) -> bool {
        self.parity().is_odd()
    }

    /// Zero-based column of `U` for an `n|m` space.
    pub fn position(self, n: usize) -> usize {
        match self {
            ColIndex::Even(a) => a - 1,
            ColIndex::Odd(mu) => n + mu - 1,
        }
    }

    /// All columns of `n|m` space in standard order.
    pub fn all(n: usize, m: usize) -> Vec<ColIndex> {
        (1..=n)
            .map(ColIndex::Even)
            .chain((1..=m).map(ColIndex::Odd))
            .collect()
    }
}

impl fmt::Display for ColIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColIndex::Even(a) => write!(f, "{a}"),
            ColIndex::Odd(mu) => write!(f, "^{mu}"),
        }
    }
}

impl Serialize for ColIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub(crate) fn join_indices(indices: &[ColIndex]) -> String {
    indices
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Sorts `indices` into canonical order and returns the sign picked up by
/// the super-antisymmetry rule `T^{..xy..} = −(−1)^{x̃ỹ} T^{..yx..}`, or
/// `None` if an even index repeats (the component vanishes).
pub fn canonical_order(indices: &[ColIndex]) -> Option<(Vec<ColIndex>, i32)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            if !(v[j - 1].is_odd() && v[j].is_odd()) {
                sign = -sign;
            }
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1] && !w[0].is_odd()) {
        return None;
    }
    Some((v, sign))
}

/// Sorts plain integer indices, returning the permutation sign, or `None`
/// on a repeat (ordinary antisymmetry).
pub fn antisymmetric_order(indices: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            sign = -sign;
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

pub(crate) fn signed(value: &GrassmannElement, sign: i32) -> GrassmannElement {
    if sign < 0 {
        -value.clone()
    } else {
        value.clone()
    }
}

/// A plane `L ⊂ n|m` of dimension `r|s`, as the even matrix of its basis rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaneRep {
    u: SuperMatrix,
    r: usize,
    s: usize,
    n: usize,
    m: usize,
}

impl PlaneRep {
    /// `u` must be even with standard row format `r|s` and column format `n|m`.
    pub fn new(u: SuperMatrix, n: usize, m: usize) -> Result<Self, PlueckerError> {
        if !u.is_even() || !u.is_standard_format() {
            return Err(PlueckerError::Shape(
                "U must be even and in standard format".into(),
            ));
        }
        let (r, s) = u.row_format();
        if u.col_format() != (n, m) {
            return Err(PlueckerError::Shape(format!(
                "column format {:?} is not {n}|{m}",
                u.col_format()
            )));
        }
        Ok(PlaneRep { u, r, s, n, m })
    }

    /// Odd entries needed to sample a generic plane of this shape.
    pub fn odd_entries(r: usize, s: usize, n: usize, m: usize) -> usize {
        r * m + s * n
    }

    /// Random even matrix; rank is not checked here (see
    /// [`sample_generic`](Self::sample_generic)).
    pub fn sample(
        sampler: &mut Sampler,
        r: usize,
        s: usize,
        n: usize,
        m: usize,
    ) -> Result<Self, PlueckerError> {
        let u = SuperMatrix::sample(
            sampler,
            SuperMatrix::standard_labels(r, s),
            SuperMatrix::standard_labels(n, m),
            BTreeSet::new(),
            BTreeSet::new(),
        )?;
        Self::new(u, n, m)
    }

    /// Draws planes from fresh samplers seeded `seed, seed+1, …` until
    /// `accept` holds, at most `attempts` times.
    pub fn sample_generic(
        seed: u64,
        dims: (usize, usize, usize, usize),
        profile: crate::sample::SamplingProfile,
        attempts: usize,
        accept: impl Fn(&PlaneRep) -> bool,
    ) -> Result<Self, PlueckerError> {
        let (r, s, n, m) = dims;
        let fresh = Self::odd_entries(r, s, n, m);
        for k in 0..attempts {
            let mut sampler = Sampler::auto(
                crate::sample::derive_seed(seed, k as u64),
                fresh,
                profile.clone(),
            );
            let plane = Self::sample(&mut sampler, r, s, n, m)?;
            if accept(&plane) {
                return Ok(plane);
            }
        }
        Err(PlueckerError::SamplingFailed(attempts))
    }

    pub fn matrix(&self) -> &SuperMatrix {
        &self.u
    }

    pub fn dims(&self) -> (usize, usize, usize, usize) {
        (self.r, self.s, self.n, self.m)
    }

    pub fn generators(&self) -> usize {
        self.u.generators()
    }

    pub fn entry(&self, row: usize, col: ColIndex) -> &GrassmannElement {
        self.u.get(row, col.position(self.n))
    }

    /// `U^{sel}`: the listed columns, the first `r` in even slots and the
    /// remaining `s` in odd slots. Mismatched columns become wrong columns.
    pub fn select(&self, columns: &[ColIndex]) -> Result<SuperMatrix, PlueckerError> {
        if columns.len() != self.r + self.s {
            return Err(PlueckerError::Shape(format!(
                "{} columns selected for a {}|{} plane",
                columns.len(),
                self.r,
                self.s
            )));
        }
        if let Some(c) = columns.iter().find(|c| match c {
            ColIndex::Even(a) => *a == 0 || *a > self.n,
            ColIndex::Odd(mu) => *mu == 0 || *mu > self.m,
        }) {
            return Err(PlueckerError::Shape(format!("column {c} out of range")));
        }
        let picks: Vec<(usize, Parity)> = columns
            .iter()
            .enumerate()
            .map(|(k, c)| {
                (
                    c.position(self.n),
                    if k < self.r {
                        Parity::Even
                    } else {
                        Parity::Odd
                    },
                )
            })
            .collect();
        Ok(self.u.select_columns(&picks)?)
    }

    /// Square submatrix with the given rows and columns, labels ignored.
    pub(crate) fn minor_matrix(&self, rows: &[usize], columns: &[ColIndex]) -> SuperMatrix {
        let cols: Vec<usize> = columns.iter().map(|c| c.position(self.n)).collect();
        self.u.submatrix(rows, &cols)
    }

    /// `g·U` for an even `(r+s)`-square `g` with the row labels of `U`.
    pub fn left_multiply(&self, g: &SuperMatrix) -> Result<PlaneRep, PlueckerError> {
        Self::new(g.mul(&self.u)?, self.n, self.m)
    }
}

/// One failed (or skipped) relation instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub relation_id: String,
    pub index_tuple: Vec<String>,
    pub lhs: Option<GrassmannElement>,
    pub rhs: Option<GrassmannElement>,
    pub skipped: bool,
}

/// Outcome of checking a relation family over many index tuples.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub checked: usize,
    pub skipped: usize,
    /// Failures and skips, in tuple order.
    pub violations: Vec<Violation>,
}

impl RelationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.iter().all(|v| v.skipped)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| !v.skipped)
    }

    pub fn merge(&mut self, other: RelationReport) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.violations.extend(other.violations);
    }
}

/// Result of one relation instance: both sides, or `None` to skip.
pub(crate) type Instance = Option<(GrassmannElement, GrassmannElement)>;

/// Evaluates `eval` over `tuples` in parallel and collects a report in
/// tuple order.
pub(crate) fn run_relation<T, F>(
    relation_id: &str,
    tuples: Vec<T>,
    label: impl Fn(&T) -> Vec<String> + Sync,
    eval: F,
) -> RelationReport
where
    T: Sync,
    F: Fn(&T) -> Instance + Sync,
{
    use rayon::prelude::*;
    let outcomes: Vec<Option<Violation>> = tuples
        .par_iter()
        .map(|t| match eval(t) {
            None => Some(Violation {
                relation_id: relation_id.to_string(),
                index_tuple: label(t),
                lhs: None,
                rhs: None,
                skipped: true,
            }),
            Some((lhs, rhs)) if lhs != rhs => Some(Violation {
                relation_id: relation_id.to_string(),
                index_tuple: label(t),
                lhs: Some(lhs),
                rhs: Some(rhs),
                skipped: false,
            }),
            Some(_) => None,
        })
        .collect();
    let mut report = RelationReport {
        checked: tuples.len(),
        ..RelationReport::default()
    };
    for v in outcomes.into_iter().flatten() {
        if v.skipped {
            report.skipped += 1;
        }
        report.violations.push(v);
    }
    report
}
