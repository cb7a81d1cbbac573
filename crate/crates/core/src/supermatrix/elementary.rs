//! Elementary row and column operations.

use super::{MatrixError, SuperMatrix};
use crate::grassmann::{GrassmannElement, Parity};

impl SuperMatrix {
    fn check_factor(&self, factor: &GrassmannElement, expected: Parity) -> Result<(), MatrixError> {
        let found = factor.parity();
        if found.admits(expected) {
            Ok(())
        } else {
            Err(MatrixError::FactorParity { expected, found })
        }
    }

    /// `row[target] += factor · row[source]`. A wrong row may receive
    /// multiples of correct rows but may not be added to a correct row.
    pub fn add_row_multiple(
        &self,
        target: usize,
        source: usize,
        factor: &GrassmannElement,
    ) -> Result<SuperMatrix, MatrixError> {
        if target >= self.rows() || source >= self.rows() || target == source {
            return Err(MatrixError::Shape(format!(
                "bad row pair ({target}, {source})"
            )));
        }
        if self.wrong_rows.contains(&source) && !self.wrong_rows.contains(&target) {
            return Err(MatrixError::ProhibitedDirection {
                target,
                source_index: source,
            });
        }
        let expected = self.effective_row_parity(target) + self.effective_row_parity(source);
        self.check_factor(factor, expected)?;
        let mut out = self.clone();
        for j in 0..self.cols() {
            let add = factor * &self.entries[source][j];
            out.entries[target][j] += &add;
        }
        Ok(out)
    }

    /// `col[target] += col[source] · factor`, with the same direction rule as
    /// [`add_row_multiple`](Self::add_row_multiple).
    pub fn add_col_multiple(
        &self,
        target: usize,
        source: usize,
        factor: &GrassmannElement,
    ) -> Result<SuperMatrix, MatrixError> {
        if target >= self.cols() || source >= self.cols() || target == source {
            return Err(MatrixError::Shape(format!(
                "bad column pair ({target}, {source})"
            )));
        }
        if self.wrong_cols.contains(&source) && !self.wrong_cols.contains(&target) {
            return Err(MatrixError::ProhibitedDirection {
                target,
                source_index: source,
            });
        }
        let expected = self.effective_col_parity(target) + self.effective_col_parity(source);
        self.check_factor(factor, expected)?;
        let mut out = self.clone();
        for i in 0..self.rows() {
            let add = &self.entries[i][source] * factor;
            out.entries[i][target] += &add;
        }
        Ok(out)
    }

    /// `row[row] = t · row[row]` for an even `t`.
    pub fn scale_row(&self, row: usize, t: &GrassmannElement) -> Result<SuperMatrix, MatrixError> {
        if row >= self.rows() {
            return Err(MatrixError::Shape(format!("row {row} out of range")));
        }
        self.check_factor(t, Parity::Even)?;
        let mut out = self.clone();
        for e in &mut out.entries[row] {
            *e = t * &*e;
        }
        Ok(out)
    }

    /// `col[col] = col[col] · t` for an even `t`.
    pub fn scale_col(&self, col: usize, t: &GrassmannElement) -> Result<SuperMatrix, MatrixError> {
        if col >= self.cols() {
            return Err(MatrixError::Shape(format!("column {col} out of range")));
        }
        self.check_factor(t, Parity::Even)?;
        let mut out = self.clone();
        for row in &mut out.entries {
            row[col] = &row[col] * t;
        }
        Ok(out)
    }
}
