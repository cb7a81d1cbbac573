//! Label-free matrix kernels on raw entry grids.

use crate::grassmann::GrassmannElement;
use std::collections::HashMap;

pub(crate) type Grid = Vec<Vec<GrassmannElement>>;

/// `cols` is the column count of `b`, needed when `b` has no rows.
pub(crate) fn mul(a: &Grid, b: &Grid, cols: usize, generators: usize) -> Grid {
    let inner = b.len();
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = GrassmannElement::zero(generators);
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &(&row[k] * &b[k][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub(crate) fn sub(a: &Grid, b: &Grid) -> Grid {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub(crate) fn transpose(a: &Grid) -> Grid {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

fn is_pivot(e: &GrassmannElement) -> bool {
    e.parity().admits(crate::grassmann::Parity::Even) && !e.body().eq(&num_traits::Zero::zero())
}

/// Gauss–Jordan inverse. A pivot is an even entry with nonzero body; for an
/// even supermatrix such entries only occur in same-parity positions.
pub(crate) fn inverse(m: &Grid, generators: usize) -> Option<Grid> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut work = m.clone();
    let mut acc: Grid = (0..n)
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
    let mut used = vec![false; n];
    let mut pivot_row = vec![0usize; n];
    for c in 0..n {
        let p = (0..n).find(|&i| !used[i] && is_pivot(&work[i][c]))?;
        used[p] = true;
        pivot_row[c] = p;
        let inv = work[p][c].invert().ok()?;
        for j in 0..n {
            work[p][j] = &inv * &work[p][j];
            acc[p][j] = &inv * &acc[p][j];
        }
        for i in 0..n {
            if i == p || work[i][c].is_zero() {
                continue;
            }
            let f = work[i][c].clone();
            for j in 0..n {
                let dw = &f * &work[p][j];
                work[i][j] -= &dw;
                let da = &f * &acc[p][j];
                acc[i][j] -= &da;
            }
        }
    }
    // work is now the permutation matrix with 1 at (pivot_row[c], c)
    Some(pivot_row.iter().map(|&p| acc[p].clone()).collect())
}

/// Leibniz determinant with the factors of every monomial ordered by row:
/// `Σ_σ sgn σ · m[0][σ0] · m[1][σ1] ⋯`. Computed by expansion along the top
/// row with memoized minors on the trailing rows.
pub(crate) fn det_rows(m: &Grid, generators: usize) -> GrassmannElement {
    let n = m.len();
    if n == 0 {
        return GrassmannElement::one(generators);
    }
    assert!(n < 64, "determinant size {n} too large");
    let mut memo: HashMap<u64, GrassmannElement> = HashMap::new();
    minor(m, (1u64 << n) - 1, generators, &mut memo)
}

fn minor(
    m: &Grid,
    cols: u64,
    generators: usize,
    memo: &mut HashMap<u64, GrassmannElement>,
) -> GrassmannElement {
    let k = cols.count_ones() as usize;
    if k == 0 {
        return GrassmannElement::one(generators);
    }
    if let Some(v) = memo.get(&cols) {
        return v.clone();
    }
    let row = m.len() - k;
    let mut acc = GrassmannElement::zero(generators);
    let mut rest = cols;
    let mut position = 0;
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if !m[row][j].is_zero() {
            let sub = minor(m, cols & !(1u64 << j), generators, memo);
            if !sub.is_zero() {
                let term = &m[row][j] * &sub;
                if position % 2 == 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
        }
        position += 1;
    }
    memo.insert(cols, acc.clone());
    acc
}

/// Leibniz determinant with factors ordered by column:
/// `Σ_σ sgn σ · m[σ0][0] · m[σ1][1] ⋯`.
pub(crate) fn det_cols(m: &Grid, generators: usize) -> GrassmannElement {
    det_rows(&transpose(m), generators)
}
