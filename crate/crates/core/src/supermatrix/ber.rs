//! Berezinian, inverse Berezinian and plain determinants.

use super::grid::{self, Grid};
use super::{MatrixError, SuperMatrix};
use crate::grassmann::{GrassmannElement, Parity};
use serde::Serialize;

/// Both sides of a wrong-matrix determinant identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WrongIdentityCheck {
    pub lhs: GrassmannElement,
    pub rhs: GrassmannElement,
    pub equal: bool,
}

/// Order of the factors inside each Leibniz monomial of a forgetful
/// determinant. Only matters when a monomial has two or more odd factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorOrder {
    /// `m[0][σ0] · m[1][σ1] ⋯`
    Rows,
    /// `m[σ0][0] · m[σ1][1] ⋯`
    Columns,
}

/// Which slot group must hold the wrong vector.
#[derive(Clone, Copy)]
enum Variant {
    Ber,
    BerStar,
}

impl SuperMatrix {
    fn check_wrong_placement(&self, variant: Variant) -> Result<(), MatrixError> {
        if self.wrong_count() > 1 {
            return Err(MatrixError::TooManyWrongVectors(self.wrong_count()));
        }
        let allowed = match variant {
            Variant::Ber => Parity::Even,
            Variant::BerStar => Parity::Odd,
        };
        let misplaced = self
            .wrong_rows
            .iter()
            .any(|&i| self.row_parities[i] != allowed)
            || self
                .wrong_cols
                .iter()
                .any(|&j| self.col_parities[j] != allowed);
        if misplaced {
            let name = match variant {
                Variant::Ber => "ber",
                Variant::BerStar => "ber_star",
            };
            return Err(MatrixError::WrongVectorPlacement(format!(
                "{name} needs the wrong vector in an {allowed} row or column"
            )));
        }
        Ok(())
    }

    /// Standard-format blocks as raw grids plus the standardization sign.
    fn standard_blocks(&self) -> ([Grid; 4], i32) {
        let (std, sign) = self.to_standard_format();
        let (r, _) = std.row_format();
        let split = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| -> Grid {
            rows.map(|i| std.entries[i][cols.clone()].to_vec())
                .collect()
        };
        let (n, m) = (std.rows(), std.cols());
        (
            [
                split(0..r, 0..r),
                split(0..r, r..m),
                split(r..n, 0..r),
                split(r..n, r..m),
            ],
            sign,
        )
    }

    fn with_sign(&self, value: GrassmannElement, sign: i32) -> GrassmannElement {
        if sign < 0 {
            -value
        } else {
            value
        }
    }

    /// `det(A00 − A01·A11⁻¹·A10) · det(A11)⁻¹` after standardization; the
    /// permutation sign is applied to the result.
    pub fn ber(&self) -> Result<GrassmannElement, MatrixError> {
        self.check_square_format()?;
        self.check_wrong_placement(Variant::Ber)?;
        let n = self.generators;
        let ([a00, a01, a10, a11], sign) = self.standard_blocks();
        let (r, s) = self.row_format();
        let det11 = grid::det_rows(&a11, n);
        let inv_det11 = det11
            .invert()
            .map_err(|_| MatrixError::BlockNotInvertible("A11"))?;
        let inv11 = grid::inverse(&a11, n).ok_or(MatrixError::BlockNotInvertible("A11"))?;
        let schur = grid::sub(&a00, &grid::mul(&grid::mul(&a01, &inv11, s, n), &a10, r, n));
        let value = &grid::det_rows(&schur, n) * &inv_det11;
        Ok(self.with_sign(value, sign))
    }

    /// `det(A11 − A10·A00⁻¹·A01) · det(A00)⁻¹` after standardization. This is
    /// an independent route to `ber(parity_reverse(M))`.
    pub fn ber_star(&self) -> Result<GrassmannElement, MatrixError> {
        self.check_square_format()?;
        self.check_wrong_placement(Variant::BerStar)?;
        let n = self.generators;
        let ([a00, a01, a10, a11], sign) = self.standard_blocks();
        let (r, s) = self.row_format();
        let det00 = grid::det_rows(&a00, n);
        let inv_det00 = det00
            .invert()
            .map_err(|_| MatrixError::BlockNotInvertible("A00"))?;
        let inv00 = grid::inverse(&a00, n).ok_or(MatrixError::BlockNotInvertible("A00"))?;
        let schur = grid::sub(&a11, &grid::mul(&grid::mul(&a10, &inv00, r, n), &a01, s, n));
        let value = &grid::det_rows(&schur, n) * &inv_det00;
        Ok(self.with_sign(value, sign))
    }

    /// Ordinary determinant of a matrix whose entries all commute with each
    /// other (e.g. an even block). Factors are taken in row order.
    pub fn det(&self) -> Result<GrassmannElement, MatrixError> {
        if self.rows() != self.cols() {
            return Err(MatrixError::Shape(format!(
                "{}x{} is not square",
                self.rows(),
                self.cols()
            )));
        }
        Ok(grid::det_rows(&self.entries, self.generators))
    }

    /// Determinant with parity labels ignored, in the stored row/column
    /// order. Each Leibniz monomial lists its factors by ascending row index,
    /// `Σ_σ sgn σ · m[0][σ0] · m[1][σ1] ⋯`.
    pub fn det_forgetful(&self) -> Result<GrassmannElement, MatrixError> {
        self.det_forgetful_ordered(FactorOrder::Rows)
    }

    pub fn det_forgetful_ordered(
        &self,
        order: FactorOrder,
    ) -> Result<GrassmannElement, MatrixError> {
        if self.rows() != self.cols() {
            return Err(MatrixError::Shape(format!(
                "{}x{} is not square",
                self.rows(),
                self.cols()
            )));
        }
        Ok(match order {
            FactorOrder::Rows => grid::det_rows(&self.entries, self.generators),
            FactorOrder::Columns => grid::det_cols(&self.entries, self.generators),
        })
    }

    /// Determinant identity for wrong matrices of format `r|1` (wrong vector
    /// in the odd slot, compared against `ber_star`) or `1|r` (wrong vector
    /// in the even slot, compared against `ber`). The matrix must be in
    /// standard format. `lhs` is the Berezinian, `rhs` is
    /// `det_forgetful · det(block)⁻²` with the all-even block of the variant.
    pub fn check_wrong_identity_r1(&self) -> Result<WrongIdentityCheck, MatrixError> {
        self.check_square_format()?;
        if !self.is_standard_format() {
            return Err(MatrixError::Shape("expected standard format".into()));
        }
        if self.wrong_count() != 1 {
            return Err(MatrixError::TooManyWrongVectors(self.wrong_count()));
        }
        let (even, odd) = self.row_format();
        let slot_parity = match (self.wrong_rows.iter().next(), self.wrong_cols.iter().next()) {
            (Some(&i), _) => self.row_parities[i],
            (_, Some(&j)) => self.col_parities[j],
            _ => unreachable!(),
        };
        let n = self.generators;
        let ([a00, _, _, a11], _) = self.standard_blocks();
        let (lhs, block) = match (slot_parity, even, odd) {
            (Parity::Odd, _, 1) => (self.ber_star()?, a00),
            (Parity::Even, 1, _) => (self.ber()?, a11),
            _ => {
                return Err(MatrixError::WrongVectorPlacement(format!(
                    "{even}|{odd} matrix with a wrong {slot_parity} vector is not covered"
                )))
            }
        };
        let inv = grid::det_rows(&block, n)
            .invert()
            .map_err(|_| MatrixError::BlockNotInvertible("even block"))?;
        let rhs = &self.det_forgetful()? * &inv.square();
        let equal = lhs == rhs;
        Ok(WrongIdentityCheck { lhs, rhs, equal })
    }

    /// `ber_star(A)·det(A00)²` for an `r|1` wrong matrix; antisymmetric in
    /// the columns (and rows) of `A`.
    pub fn normalized_ber_star(&self) -> Result<GrassmannElement, MatrixError> {
        let n = self.generators;
        let ([a00, ..], _) = self.standard_blocks();
        let det00 = grid::det_rows(&a00, n);
        Ok(&self.ber_star()? * &det00.square())
    }
}
