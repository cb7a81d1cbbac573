//! Parity-labelled matrices over Λ_N.
//!
//! A [`SuperMatrix`] carries a parity label for each row and column. Entry
//! `(i, j)` must be homogeneous with parity `row(i) + col(j)`, flipped once
//! for each of `i ∈ wrong_rows`, `j ∈ wrong_cols`. Even matrices have no
//! wrong vectors; a "wrong" matrix has exactly one row or column of the
//! opposite parity.

mod ber;
mod elementary;
mod grid;

pub use ber::{FactorOrder, WrongIdentityCheck};

use crate::grassmann::{AlgebraError, GrassmannElement, Parity, ParityClass};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub(crate) use grid::Grid;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("entry ({row}, {col}) should be {expected}, found {found}")]
    EntryParity {
        row: usize,
        col: usize,
        expected: Parity,
        found: ParityClass,
    },
    #[error("row format {rows:?} does not match column format {cols:?}")]
    NotSquareFormat {
        rows: (usize, usize),
        cols: (usize, usize),
    },
    #[error("at most one wrong vector is supported, found {0}")]
    TooManyWrongVectors(usize),
    #[error("wrong vector placement: {0}")]
    WrongVectorPlacement(String),
    #[error("matrix is not invertible (no pivot with invertible body)")]
    Singular,
    #[error("block {0} is not invertible")]
    BlockNotInvertible(&'static str),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error(
        "cannot add a multiple of wrong row/column {source_index} to correct row/column {target}"
    )]
    ProhibitedDirection { target: usize, source_index: usize },
    #[error("factor should be {expected}, found {found}")]
    FactorParity {
        expected: Parity,
        found: ParityClass,
    },
    #[error("expected an even matrix (no wrong vectors)")]
    NotEven,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperMatrix {
    row_parities: Vec<Parity>,
    col_parities: Vec<Parity>,
    wrong_rows: BTreeSet<usize>,
    wrong_cols: BTreeSet<usize>,
    entries: Grid,
    generators: usize,
}

/// Blocks of a matrix in standard format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub a00: SuperMatrix,
    pub a01: SuperMatrix,
    pub a10: SuperMatrix,
    pub a11: SuperMatrix,
}

/// Sign of a permutation given as `perm[new] = old`.
pub fn permutation_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

fn check_permutation(perm: &[usize], len: usize) -> Result<(), MatrixError> {
    if perm.len() != len {
        return Err(MatrixError::InvalidPermutation(format!(
            "length {} for {} entries",
            perm.len(),
            len
        )));
    }
    let mut seen = vec![false; len];
    for &p in perm {
        if p >= len || std::mem::replace(&mut seen[p], true) {
            return Err(MatrixError::InvalidPermutation(format!(
                "{perm:?} is not a permutation"
            )));
        }
    }
    Ok(())
}

fn standard_order(labels: &[Parity]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..labels.len())
        .filter(|&i| labels[i] == Parity::Even)
        .collect();
    order.extend((0..labels.len()).filter(|&i| labels[i] == Parity::Odd));
    order
}

fn is_standard(labels: &[Parity]) -> bool {
    labels.windows(2).all(|w| w[0] <= w[1])
}

fn count_format(labels: &[Parity]) -> (usize, usize) {
    let odd = labels.iter().filter(|p| p.is_odd()).count();
    (labels.len() - odd, odd)
}

impl SuperMatrix {
    /// An even matrix; every entry is validated.
    pub fn new(
        row_parities: Vec<Parity>,
        col_parities: Vec<Parity>,
        entries: Vec<Vec<GrassmannElement>>,
    ) -> Result<Self, MatrixError> {
        Self::with_wrong(
            row_parities,
            col_parities,
            BTreeSet::new(),
            BTreeSet::new(),
            entries,
        )
    }

    pub fn with_wrong(
        row_parities: Vec<Parity>,
        col_parities: Vec<Parity>,
        wrong_rows: BTreeSet<usize>,
        wrong_cols: BTreeSet<usize>,
        entries: Vec<Vec<GrassmannElement>>,
    ) -> Result<Self, MatrixError> {
        if entries.len() != row_parities.len() {
            return Err(MatrixError::Shape(format!(
                "{} rows of entries for {} row labels",
                entries.len(),
                row_parities.len()
            )));
        }
        if let Some(bad) = entries.iter().position(|r| r.len() != col_parities.len()) {
            return Err(MatrixError::Shape(format!(
                "row {bad} has {} entries for {} column labels",
                entries[bad].len(),
                col_parities.len()
            )));
        }
        if wrong_rows.iter().any(|&i| i >= row_parities.len())
            || wrong_cols.iter().any(|&j| j >= col_parities.len())
        {
            return Err(MatrixError::Shape("wrong vector index out of range".into()));
        }
        let generators = match entries.iter().flatten().next() {
            Some(e) => e.generator_count(),
            None => 0,
        };
        for e in entries.iter().flatten() {
            if e.generator_count() != generators {
                return Err(
                    AlgebraError::GeneratorMismatch(generators, e.generator_count()).into(),
                );
            }
        }
        let m = SuperMatrix {
            row_parities,
            col_parities,
            wrong_rows,
            wrong_cols,
            entries,
            generators,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), MatrixError> {
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                let expected = self.expected_parity(i, j);
                let found = self.entries[i][j].parity();
                if !found.admits(expected) {
                    return Err(MatrixError::EntryParity {
                        row: i,
                        col: j,
                        expected,
                        found,
                    });
                }
            }
        }
        Ok(())
    }

    /// Identity with the given (row = column) labels.
    pub fn identity(parities: Vec<Parity>, generators: usize) -> Self {
        let n = parities.len();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            GrassmannElement::one(generators)
                        } else {
                            GrassmannElement::zero(generators)
                        }
                    })
                    .collect()
            })
            .collect();
        SuperMatrix {
            row_parities: parities.clone(),
            col_parities: parities,
            wrong_rows: BTreeSet::new(),
            wrong_cols: BTreeSet::new(),
            entries,
            generators,
        }
    }

    /// Standard-format labels `r` even then `s` odd.
    pub fn standard_labels(even: usize, odd: usize) -> Vec<Parity> {
        let mut v = vec![Parity::Even; even];
        v.extend(std::iter::repeat_n(Parity::Odd, odd));
        v
    }

    pub fn rows(&self) -> usize {
        self.row_parities.len()
    }

    pub fn cols(&self) -> usize {
        self.col_parities.len()
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn row_parities(&self) -> &[Parity] {
        &self.row_parities
    }

    pub fn col_parities(&self) -> &[Parity] {
        &self.col_parities
    }

    pub fn wrong_rows(&self) -> &BTreeSet<usize> {
        &self.wrong_rows
    }

    pub fn wrong_cols(&self) -> &BTreeSet<usize> {
        &self.wrong_cols
    }

    pub fn is_even(&self) -> bool {
        self.wrong_rows.is_empty() && self.wrong_cols.is_empty()
    }

    pub fn wrong_count(&self) -> usize {
        self.wrong_rows.len() + self.wrong_cols.len()
    }

    pub fn get(&self, row: usize, col: usize) -> &GrassmannElement {
        &self.entries[row][col]
    }

    pub fn entries(&self) -> &[Vec<GrassmannElement>] {
        &self.entries
    }

    /// `(even, odd)` counts of the row labels.
    pub fn row_format(&self) -> (usize, usize) {
        count_format(&self.row_parities)
    }

    pub fn col_format(&self) -> (usize, usize) {
        count_format(&self.col_parities)
    }

    pub fn effective_row_parity(&self, row: usize) -> Parity {
        self.row_parities[row] + Parity::from_bit(self.wrong_rows.contains(&row))
    }

    pub fn effective_col_parity(&self, col: usize) -> Parity {
        self.col_parities[col] + Parity::from_bit(self.wrong_cols.contains(&col))
    }

    pub fn expected_parity(&self, row: usize, col: usize) -> Parity {
        self.effective_row_parity(row) + self.effective_col_parity(col)
    }

    pub fn is_standard_format(&self) -> bool {
        is_standard(&self.row_parities) && is_standard(&self.col_parities)
    }

    pub(crate) fn check_square_format(&self) -> Result<(), MatrixError> {
        let (rows, cols) = (self.row_format(), self.col_format());
        if rows == cols {
            Ok(())
        } else {
            Err(MatrixError::NotSquareFormat { rows, cols })
        }
    }

    /// Reorders rows (`perm[new] = old`). The permutation must keep every
    /// row label in place (a shuffle within parity groups) or produce
    /// standard format. Returns the matrix and `sign(perm)`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<(SuperMatrix, i32), MatrixError> {
        check_permutation(perm, self.rows())?;
        let labels: Vec<Parity> = perm.iter().map(|&p| self.row_parities[p]).collect();
        if labels != self.row_parities && !is_standard(&labels) {
            return Err(MatrixError::InvalidPermutation(format!(
                "{perm:?} mixes row parity groups"
            )));
        }
        Ok((self.reorder_rows(perm), permutation_sign(perm)))
    }

    pub fn permute_cols(&self, perm: &[usize]) -> Result<(SuperMatrix, i32), MatrixError> {
        check_permutation(perm, self.cols())?;
        let labels: Vec<Parity> = perm.iter().map(|&p| self.col_parities[p]).collect();
        if labels != self.col_parities && !is_standard(&labels) {
            return Err(MatrixError::InvalidPermutation(format!(
                "{perm:?} mixes column parity groups"
            )));
        }
        Ok((self.reorder_cols(perm), permutation_sign(perm)))
    }

    fn reorder_rows(&self, perm: &[usize]) -> SuperMatrix {
        SuperMatrix {
            row_parities: perm.iter().map(|&p| self.row_parities[p]).collect(),
            col_parities: self.col_parities.clone(),
            wrong_rows: (0..perm.len())
                .filter(|&k| self.wrong_rows.contains(&perm[k]))
                .collect(),
            wrong_cols: self.wrong_cols.clone(),
            entries: perm.iter().map(|&p| self.entries[p].clone()).collect(),
            generators: self.generators,
        }
    }

    fn reorder_cols(&self, perm: &[usize]) -> SuperMatrix {
        SuperMatrix {
            row_parities: self.row_parities.clone(),
            col_parities: perm.iter().map(|&p| self.col_parities[p]).collect(),
            wrong_rows: self.wrong_rows.clone(),
            wrong_cols: (0..perm.len())
                .filter(|&k| self.wrong_cols.contains(&perm[k]))
                .collect(),
            entries: self
                .entries
                .iter()
                .map(|row| perm.iter().map(|&p| row[p].clone()).collect())
                .collect(),
            generators: self.generators,
        }
    }

    /// Even rows/columns first, relative order kept within each group.
    /// The sign is the product of the row and column permutation signs.
    pub fn to_standard_format(&self) -> (SuperMatrix, i32) {
        let rp = standard_order(&self.row_parities);
        let cp = standard_order(&self.col_parities);
        let sign = permutation_sign(&rp) * permutation_sign(&cp);
        (self.reorder_rows(&rp).reorder_cols(&cp), sign)
    }

    /// Relabels every row and column with the opposite parity; entries and
    /// wrong-vector flags are untouched.
    pub fn parity_reverse(&self) -> SuperMatrix {
        SuperMatrix {
            row_parities: self.row_parities.iter().map(|p| p.flip()).collect(),
            col_parities: self.col_parities.iter().map(|p| p.flip()).collect(),
            ..self.clone()
        }
    }

    /// Blocks of the standard-format matrix (standardizing first).
    pub fn blocks(&self) -> BlockDecomposition {
        let (std, _) = self.to_standard_format();
        let (r, _) = std.row_format();
        let (p, _) = std.col_format();
        let (rows, cols) = (std.rows(), std.cols());
        BlockDecomposition {
            a00: std.submatrix(&(0..r).collect::<Vec<_>>(), &(0..p).collect::<Vec<_>>()),
            a01: std.submatrix(&(0..r).collect::<Vec<_>>(), &(p..cols).collect::<Vec<_>>()),
            a10: std.submatrix(&(r..rows).collect::<Vec<_>>(), &(0..p).collect::<Vec<_>>()),
            a11: std.submatrix(
                &(r..rows).collect::<Vec<_>>(),
                &(p..cols).collect::<Vec<_>>(),
            ),
        }
    }

    /// Rows and columns picked by index, labels and wrong flags carried over.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SuperMatrix {
        SuperMatrix {
            row_parities: rows.iter().map(|&i| self.row_parities[i]).collect(),
            col_parities: cols.iter().map(|&j| self.col_parities[j]).collect(),
            wrong_rows: (0..rows.len())
                .filter(|&k| self.wrong_rows.contains(&rows[k]))
                .collect(),
            wrong_cols: (0..cols.len())
                .filter(|&k| self.wrong_cols.contains(&cols[k]))
                .collect(),
            entries: rows
                .iter()
                .map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect())
                .collect(),
            generators: self.generators,
        }
    }

    /// Picks columns and places each in a slot with the given label. A
    /// column whose own parity differs from its slot label becomes a wrong
    /// column (this is how Plücker coordinates select submatrices).
    pub fn select_columns(&self, picks: &[(usize, Parity)]) -> Result<SuperMatrix, MatrixError> {
        if let Some((j, _)) = picks.iter().find(|(j, _)| *j >= self.cols()) {
            return Err(MatrixError::Shape(format!("column {j} out of range")));
        }
        let wrong_cols = (0..picks.len())
            .filter(|&k| {
                let (j, label) = picks[k];
                self.effective_col_parity(j) != label
            })
            .collect();
        Ok(SuperMatrix {
            row_parities: self.row_parities.clone(),
            col_parities: picks.iter().map(|p| p.1).collect(),
            wrong_rows: self.wrong_rows.clone(),
            wrong_cols,
            entries: self
                .entries
                .iter()
                .map(|row| picks.iter().map(|&(j, _)| row[j].clone()).collect())
                .collect(),
            generators: self.generators,
        })
    }

    /// Swaps two columns' entries while keeping labels and wrong flags with
    /// the slots.
    pub fn swap_column_entries(&self, a: usize, b: usize) -> Result<SuperMatrix, MatrixError> {
        let mut out = self.clone();
        for row in &mut out.entries {
            row.swap(a, b);
        }
        out.validate()?;
        Ok(out)
    }

    pub fn swap_row_entries(&self, a: usize, b: usize) -> Result<SuperMatrix, MatrixError> {
        let mut out = self.clone();
        out.entries.swap(a, b);
        out.validate()?;
        Ok(out)
    }

    /// Ordinary matrix product `(MN)_{ij} = Σ_k M_{ik} N_{kj}`. Column labels
    /// of `self` must equal row labels of `other`; wrong vectors may only sit
    /// in rows of `self` or columns of `other`.
    pub fn mul(&self, other: &SuperMatrix) -> Result<SuperMatrix, MatrixError> {
        if self.col_parities != other.row_parities {
            return Err(MatrixError::Shape(format!(
                "column labels {:?} do not match row labels {:?}",
                self.col_parities, other.row_parities
            )));
        }
        if !self.wrong_cols.is_empty() || !other.wrong_rows.is_empty() {
            return Err(MatrixError::WrongVectorPlacement(
                "product contracts over a wrong vector".into(),
            ));
        }
        if self.generators != other.generators && self.rows() * other.cols() > 0 {
            return Err(AlgebraError::GeneratorMismatch(self.generators, other.generators).into());
        }
        Ok(SuperMatrix {
            row_parities: self.row_parities.clone(),
            col_parities: other.col_parities.clone(),
            wrong_rows: self.wrong_rows.clone(),
            wrong_cols: other.wrong_cols.clone(),
            entries: grid::mul(&self.entries, &other.entries, other.cols(), self.generators),
            generators: self.generators,
        })
    }

    /// Two-sided inverse of an even matrix by Gauss–Jordan elimination with
    /// body-invertible pivots.
    pub fn inverse(&self) -> Result<SuperMatrix, MatrixError> {
        if !self.is_even() {
            return Err(MatrixError::NotEven);
        }
        self.check_square_format()?;
        let inv = grid::inverse(&self.entries, self.generators).ok_or(MatrixError::Singular)?;
        Ok(SuperMatrix {
            row_parities: self.col_parities.clone(),
            col_parities: self.row_parities.clone(),
            wrong_rows: BTreeSet::new(),
            wrong_cols: BTreeSet::new(),
            entries: inv,
            generators: self.generators,
        })
    }

    pub fn to_record(&self) -> SuperMatrixRecord {
        SuperMatrixRecord {
            row_parities: self.row_parities.clone(),
            col_parities: self.col_parities.clone(),
            wrong_rows: self.wrong_rows.iter().copied().collect(),
            wrong_cols: self.wrong_cols.iter().copied().collect(),
            entries: self
                .entries
                .iter()
                .map(|row| row.iter().map(|e| e.to_records()).collect())
                .collect(),
        }
    }

    pub fn from_record(record: &SuperMatrixRecord, generators: usize) -> Result<Self, MatrixError> {
        let entries = record
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|terms| GrassmannElement::from_records(generators, terms))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_wrong(
            record.row_parities.clone(),
            record.col_parities.clone(),
            record.wrong_rows.iter().copied().collect(),
            record.wrong_cols.iter().copied().collect(),
            entries,
        )
    }
}

impl SuperMatrix {
    /// Random matrix with the given labels: even entries with nonzero body,
    /// odd entries on fresh generators. A wrong row/column gets entries of
    /// the flipped parity.
    pub fn sample(
        sampler: &mut crate::sample::Sampler,
        row_parities: Vec<Parity>,
        col_parities: Vec<Parity>,
        wrong_rows: BTreeSet<usize>,
        wrong_cols: BTreeSet<usize>,
    ) -> Result<SuperMatrix, MatrixError> {
        let mut entries = Vec::with_capacity(row_parities.len());
        for (i, rp) in row_parities.iter().enumerate() {
            let mut row = Vec::with_capacity(col_parities.len());
            for (j, cp) in col_parities.iter().enumerate() {
                let flips = wrong_rows.contains(&i) ^ wrong_cols.contains(&j);
                let parity = *rp + *cp + Parity::from_bit(flips);
                row.push(match parity {
                    Parity::Even => sampler.sample_even(),
                    Parity::Odd => sampler.sample_odd()?,
                });
            }
            entries.push(row);
        }
        Self::with_wrong(row_parities, col_parities, wrong_rows, wrong_cols, entries)
    }

    /// Number of odd entries [`sample`](Self::sample) would draw.
    pub fn odd_entry_count(
        row_parities: &[Parity],
        col_parities: &[Parity],
        wrong_rows: &BTreeSet<usize>,
        wrong_cols: &BTreeSet<usize>,
    ) -> usize {
        let mut count = 0;
        for (i, rp) in row_parities.iter().enumerate() {
            for (j, cp) in col_parities.iter().enumerate() {
                let flips = wrong_rows.contains(&i) ^ wrong_cols.contains(&j);
                if (*rp + *cp + Parity::from_bit(flips)).is_odd() {
                    count += 1;
                }
            }
        }
        count
    }
}

impl BlockDecomposition {
    /// Standard-format matrix assembled from the four blocks.
    pub fn reassemble(&self) -> SuperMatrix {
        let top = self.a00.entries.iter().zip(&self.a01.entries);
        let bottom = self.a10.entries.iter().zip(&self.a11.entries);
        let entries = top
            .chain(bottom)
            .map(|(l, r)| l.iter().chain(r).cloned().collect())
            .collect();
        let r = self.a00.rows();
        let p = self.a00.cols();
        let mut wrong_rows: BTreeSet<usize> = self.a00.wrong_rows.clone();
        wrong_rows.extend(self.a01.wrong_rows.iter());
        wrong_rows.extend(self.a10.wrong_rows.iter().map(|i| i + r));
        wrong_rows.extend(self.a11.wrong_rows.iter().map(|i| i + r));
        let mut wrong_cols: BTreeSet<usize> = self.a00.wrong_cols.clone();
        wrong_cols.extend(self.a10.wrong_cols.iter());
        wrong_cols.extend(self.a01.wrong_cols.iter().map(|j| j + p));
        wrong_cols.extend(self.a11.wrong_cols.iter().map(|j| j + p));
        let row_parities = self
            .a00
            .row_parities
            .iter()
            .chain(&self.a10.row_parities)
            .copied()
            .collect();
        let col_parities = self
            .a00
            .col_parities
            .iter()
            .chain(&self.a01.col_parities)
            .copied()
            .collect();
        SuperMatrix {
            row_parities,
            col_parities,
            wrong_rows,
            wrong_cols,
            entries,
            generators: self.a00.generators.max(self.a11.generators),
        }
    }
}

/// JSON form: `{row_parities, col_parities, wrong_rows, wrong_cols, entries}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperMatrixRecord {
    pub row_parities: Vec<Parity>,
    pub col_parities: Vec<Parity>,
    pub wrong_rows: Vec<usize>,
    pub wrong_cols: Vec<usize>,
    pub entries: Vec<Vec<Vec<crate::grassmann::TermRecord>>>,
}

impl Serialize for SuperMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_record().serialize(s)
    }
}

#[cfg(test)]
mod tests;
