//! Even multivectors `u1 ∧ … ∧ ur` and the relations among their components.

use super::{
    canonical_order, join_indices, run_relation, signed, ColIndex, PlaneRep, PlueckerError,
    RelationReport,
};
use crate::grassmann::{GrassmannElement, Parity};
use itertools::Itertools;
use serde::Serialize;
use std::collections::BTreeMap;

/// Components `T^{a1…ar}` of an even multivector, stored under canonical
/// keys (even indices strictly ascending, then odd indices weakly
/// ascending). Other index orders are reached through
/// [`component`](Self::component).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multivector {
    degree: usize,
    n: usize,
    m: usize,
    generators: usize,
    components: BTreeMap<Vec<ColIndex>, GrassmannElement>,
}

impl Serialize for Multivector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(
            self.components
                .iter()
                .map(|(k, v)| (format!("T[{}]", join_indices(k)), v)),
        )
    }
}

fn canonical_keys(r: usize, n: usize, m: usize) -> Vec<Vec<ColIndex>> {
    let mut keys = Vec::new();
    for evens in 0..=r.min(n) {
        let odd_count = r - evens;
        if odd_count > 0 && m == 0 {
            continue;
        }
        for e in (1..=n).combinations(evens) {
            for o in (1..=m).combinations_with_replacement(odd_count) {
                let key: Vec<ColIndex> = e
                    .iter()
                    .map(|&a| ColIndex::Even(a))
                    .chain(o.iter().map(|&mu| ColIndex::Odd(mu)))
                    .collect();
                keys.push(key);
            }
        }
    }
    keys
}

impl Multivector {
    /// `u1 ∧ … ∧ ur` for even vectors given by their coordinates in `n|m`
    /// space (even entries first, then odd).
    ///
    /// For a key `A = (a1…ar)` the component is
    /// `Σ_π s(π) ε(A) ∏_k u_k^{a_{π(k)}}`, where `s(π)` counts inversions of
    /// `π` except those between two odd indices and `ε(A) = (−1)^{o(o−1)/2}`
    /// for `o` odd indices. All-even keys give ordinary `r×r` minors.
    pub fn wedge(
        rows: &[Vec<GrassmannElement>],
        n: usize,
        m: usize,
    ) -> Result<Self, PlueckerError> {
        let r = rows.len();
        if r == 0 {
            return Err(PlueckerError::Shape("no vectors to wedge".into()));
        }
        let generators = rows[0].first().map_or(0, |e| e.generator_count());
        for (k, row) in rows.iter().enumerate() {
            if row.len() != n + m {
                return Err(PlueckerError::Shape(format!(
                    "vector {k} has {} coordinates, expected {}",
                    row.len(),
                    n + m
                )));
            }
            for (j, e) in row.iter().enumerate() {
                let expected = if j < n { Parity::Even } else { Parity::Odd };
                if !e.parity().admits(expected) {
                    return Err(PlueckerError::Shape(format!(
                        "vector {k} coordinate {j} should be {expected}"
                    )));
                }
                if e.generator_count() != generators {
                    return Err(crate::grassmann::AlgebraError::GeneratorMismatch(
                        generators,
                        e.generator_count(),
                    )
                    .into());
                }
            }
        }
        let perms: Vec<Vec<usize>> = (0..r).permutations(r).collect();
        let components = canonical_keys(r, n, m)
            .into_iter()
            .map(|key| {
                let value = wedge_component(rows, &key, &perms, n, generators);
                (key, value)
            })
            .collect();
        Ok(Multivector {
            degree: r,
            n,
            m,
            generators,
            components,
        })
    }

    pub fn from_plane(plane: &PlaneRep) -> Result<Self, PlueckerError> {
        let (r, s, n, m) = plane.dims();
        if s != 0 {
            return Err(PlueckerError::Shape(format!(
                "wedge needs an r|0 plane, got {r}|{s}"
            )));
        }
        Self::wedge(plane.matrix().entries(), n, m)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn components(&self) -> &BTreeMap<Vec<ColIndex>, GrassmannElement> {
        &self.components
    }

    /// `T^{a1…ar}` for indices in any order.
    pub fn component(&self, indices: &[ColIndex]) -> GrassmannElement {
        match canonical_order(indices) {
            None => GrassmannElement::zero(self.generators),
            Some((key, sign)) => match self.components.get(&key) {
                Some(v) => signed(v, sign),
                None => GrassmannElement::zero(self.generators),
            },
        }
    }

    /// Overwrites a canonical component (used to build perturbed inputs).
    pub fn set_component(
        &mut self,
        key: &[ColIndex],
        value: GrassmannElement,
    ) -> Result<(), PlueckerError> {
        match canonical_order(key) {
            Some((k, 1)) if k == key && self.components.contains_key(&k) => {
                self.components.insert(k, value);
                Ok(())
            }
            _ => Err(PlueckerError::Shape(format!(
                "{} is not a canonical key",
                join_indices(key)
            ))),
        }
    }

    /// Some all-even component has invertible body.
    pub fn is_nondegenerate(&self) -> bool {
        self.components
            .iter()
            .any(|(k, v)| k.iter().all(|c| !c.is_odd()) && v.invert().is_ok())
    }

    /// Simplicity relations, for every index combination
    /// `(a1…a_{r−1}, b, c1…cr)` with repeats allowed:
    ///
    /// `T^{a b} T^{c} (−1)^{b̃(Σã+Σc̃)} = Σ_j T^{a c_j} T^{c(c_j←b)} (−1)^{b̃(c̃1+…+c̃_{j−1}) + c̃_j(Σã + c̃_{j+1}+…+c̃_r)}`.
    pub fn check_simple(&self) -> Result<RelationReport, PlueckerError> {
        if !self.is_nondegenerate() {
            return Err(PlueckerError::Degenerate(
                "no invertible all-even component".into(),
            ));
        }
        let r = self.degree;
        let all = ColIndex::all(self.n, self.m);
        let tuples: Vec<Vec<ColIndex>> = std::iter::repeat_n(all.iter().copied(), 2 * r)
            .multi_cartesian_product()
            .collect();
        let bit = |c: &ColIndex| c.is_odd() as u32;
        Ok(run_relation(
            "simple",
            tuples,
            |t| t.iter().map(|c| c.to_string()).collect(),
            |t| {
                let (a, rest) = t.split_at(r - 1);
                let b = rest[0];
                let c = &rest[1..];
                let sum_a: u32 = a.iter().map(bit).sum();
                let sum_c: u32 = c.iter().map(bit).sum();
                let mut ab = a.to_vec();
                ab.push(b);
                let mut lhs = &self.component(&ab) * &self.component(c);
                if bit(&b) * (sum_a + sum_c) % 2 == 1 {
                    lhs = -lhs;
                }
                let mut rhs = GrassmannElement::zero(self.generators);
                for j in 0..r {
                    let mut acj = a.to_vec();
                    acj.push(c[j]);
                    let mut cb = c.to_vec();
                    cb[j] = b;
                    let before: u32 = c[..j].iter().map(bit).sum();
                    let after: u32 = c[j + 1..].iter().map(bit).sum();
                    let exponent = bit(&b) * before + bit(&c[j]) * (sum_a + after);
                    let term = &self.component(&acj) * &self.component(&cb);
                    if exponent % 2 == 1 {
                        rhs -= &term;
                    } else {
                        rhs += &term;
                    }
                }
                Some((lhs, rhs))
            },
        ))
    }

    /// The reduced relation families on even-index components and components
    /// with one odd index:
    ///
    /// even: `T^{a} T^{b} = Σ_j T^{b_j a2…ar} T^{b(b_j←a1)}`
    ///
    /// odd: `T^{a} T^{b1…b_{r−1} μ} = Σ_{j<r} T^{b_j a2…ar} T^{b(b_j←a1) μ} + T^{μ a2…ar} T^{b1…b_{r−1} a1}`
    pub fn check_ess_relations_r0(&self) -> RelationReport {
        let r = self.degree;
        let evens: Vec<ColIndex> = (1..=self.n).map(ColIndex::Even).collect();
        let label = |t: &Vec<ColIndex>| t.iter().map(|c| c.to_string()).collect::<Vec<_>>();
        let even_tuples: Vec<Vec<ColIndex>> = std::iter::repeat_n(evens.iter().copied(), 2 * r)
            .multi_cartesian_product()
            .collect();
        let mut report = run_relation("ess_even", even_tuples, label, |t| {
            let (a, b) = t.split_at(r);
            let lhs = &self.component(a) * &self.component(b);
            let mut rhs = GrassmannElement::zero(self.generators);
            for j in 0..r {
                let mut left = a.to_vec();
                left[0] = b[j];
                let mut right = b.to_vec();
                right[j] = a[0];
                rhs += &(&self.component(&left) * &self.component(&right));
            }
            Some((lhs, rhs))
        });
        let mut odd_tuples = Vec::new();
        for mu in 1..=self.m {
            for t in std::iter::repeat_n(evens.iter().copied(), 2 * r - 1).multi_cartesian_product()
            {
                let mut t = t;
                t.push(ColIndex::Odd(mu));
                odd_tuples.push(t);
            }
        }
        report.merge(run_relation("ess_odd", odd_tuples, label, |t| {
            let (a, rest) = t.split_at(r);
            let b = &rest[..r - 1];
            let mu = rest[r - 1];
            let lhs = &self.component(a) * &self.component(rest);
            let mut rhs = GrassmannElement::zero(self.generators);
            for j in 0..r - 1 {
                let mut left = a.to_vec();
                left[0] = b[j];
                let mut right = rest.to_vec();
                right[j] = a[0];
                rhs += &(&self.component(&left) * &self.component(&right));
            }
            let mut left = a.to_vec();
            left[0] = mu;
            let mut right = b.to_vec();
            right.push(a[0]);
            rhs += &(&self.component(&left) * &self.component(&right));
            Some((lhs, rhs))
        }));
        report
    }
}

fn wedge_component(
    rows: &[Vec<GrassmannElement>],
    key: &[ColIndex],
    perms: &[Vec<usize>],
    n: usize,
    generators: usize,
) -> GrassmannElement {
    let odd = key.iter().filter(|c| c.is_odd()).count();
    let epsilon_negative = (odd * odd.saturating_sub(1) / 2) % 2 == 1;
    let mut acc = GrassmannElement::zero(generators);
    for perm in perms {
        let picked: Vec<ColIndex> = perm.iter().map(|&p| key[p]).collect();
        let mut inversions = 0;
        for i in 0..perm.len() {
            for j in i + 1..perm.len() {
                if perm[i] > perm[j] && !(picked[i].is_odd() && picked[j].is_odd()) {
                    inversions += 1;
                }
            }
        }
        let mut term = GrassmannElement::one(generators);
        for (k, c) in picked.iter().enumerate() {
            term = &term * &rows[k][c.position(n)];
            if term.is_zero() {
                break;
            }
        }
        if (inversions % 2 == 1) ^ epsilon_negative {
            acc -= &term;
        } else {
            acc += &term;
        }
    }
    acc
}

/// Coordinates of a plane in `Gr_{2|0}(n|1)`: `T^{ab}`, `θ^a = T^{a^1}` and
/// the even nilpotent `T^{^1^1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gr20Coords {
    pub n: usize,
    generators: usize,
    /// `T^{ab}` for `a < b`.
    pub t: BTreeMap<(usize, usize), GrassmannElement>,
    pub theta: BTreeMap<usize, GrassmannElement>,
    pub t11: GrassmannElement,
}

impl Gr20Coords {
    pub fn from_plane(plane: &PlaneRep) -> Result<Self, PlueckerError> {
        let (r, s, n, m) = plane.dims();
        if (r, s, m) != (2, 0, 1) {
            return Err(PlueckerError::Shape(format!(
                "expected a 2|0 plane in n|1, got {r}|{s} in {n}|{m}"
            )));
        }
        let w = Multivector::from_plane(plane)?;
        if !w.is_nondegenerate() {
            return Err(PlueckerError::Degenerate("rank below 2".into()));
        }
        Ok(Self::from_multivector(&w))
    }

    pub fn from_multivector(w: &Multivector) -> Self {
        let n = w.n;
        let hat = ColIndex::Odd(1);
        let t = (1..=n)
            .tuple_combinations()
            .map(|(a, b)| ((a, b), w.component(&[ColIndex::Even(a), ColIndex::Even(b)])))
            .collect();
        let theta = (1..=n)
            .map(|a| (a, w.component(&[ColIndex::Even(a), hat])))
            .collect();
        Gr20Coords {
            n,
            generators: w.generators,
            t,
            theta,
            t11: w.component(&[hat, hat]),
        }
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    /// `T^{ab}` for any `a, b` (antisymmetric, zero on the diagonal).
    pub fn t(&self, a: usize, b: usize) -> GrassmannElement {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.t[&(a, b)].clone(),
            std::cmp::Ordering::Greater => -self.t[&(b, a)].clone(),
            std::cmp::Ordering::Equal => GrassmannElement::zero(self.generators),
        }
    }

    pub fn theta(&self, a: usize) -> &GrassmannElement {
        &self.theta[&a]
    }

    /// All five relations, every index combination in `1..=n`.
    pub fn check_relations(&self) -> RelationReport {
        let n = self.n;
        let zero = GrassmannElement::zero(self.generators);
        let label = |t: &Vec<usize>| t.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let tuples = |k: usize| -> Vec<Vec<usize>> {
            std::iter::repeat_n(1..=n, k)
                .multi_cartesian_product()
                .collect()
        };
        let mut report = run_relation("even_exchange", tuples(4), label, |t| {
            let (a, b, c, d) = (t[0], t[1], t[2], t[3]);
            let lhs = &self.t(a, c) * &self.t(b, d);
            let rhs = &(&self.t(a, b) * &self.t(c, d)) + &(&self.t(a, d) * &self.t(b, c));
            Some((lhs, rhs))
        });
        report.merge(run_relation("odd_exchange", tuples(3), label, |t| {
            let (a, b, c) = (t[0], t[1], t[2]);
            let lhs = &self.t(a, b) * self.theta(c);
            let rhs = &(&self.t(a, c) * self.theta(b)) + &(&self.t(c, b) * self.theta(a));
            Some((lhs, rhs))
        }));
        report.merge(run_relation("theta_product", tuples(2), label, |t| {
            let lhs = &self.t(t[0], t[1]) * &self.t11;
            let rhs = (self.theta(t[0]) * self.theta(t[1])).scale(&crate::rational::int(-2));
            Some((lhs, rhs))
        }));
        report.merge(run_relation("theta_annihilates", tuples(1), label, |t| {
            Some((self.theta(t[0]) * &self.t11, zero.clone()))
        }));
        report.merge(run_relation("nilpotent", vec![vec![]], label, |_| {
            Some((self.t11.square(), zero.clone()))
        }));
        report
    }
}
