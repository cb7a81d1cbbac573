//! Reduced coordinates `P^{a}`, `P*^{a}`, `θ^{a c}` on `Gr_{r|1}(n|1)`.

use super::{
    antisymmetric_order, run_relation, signed, ColIndex, PlaneRep, PlueckerError, RelationReport,
};
use crate::grassmann::GrassmannElement;
use crate::supermatrix::{FactorOrder, SuperMatrix};
use itertools::Itertools;
use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, HashMap};

/// Sorted `r+1` distinct even column indices.
pub type ThetaKey = Vec<usize>;

/// `P^{a} = T^{a|^1}`, `P*^{a} = T*^{a|^1}` and `θ^{a c} = T*^{a|c}(P^{a})²`,
/// stored under sorted keys; accessors accept any index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedCoordsR1 {
    pub r: usize,
    pub n: usize,
    generators: usize,
    pub p: BTreeMap<Vec<usize>, GrassmannElement>,
    pub p_star: BTreeMap<Vec<usize>, GrassmannElement>,
    /// From the definition.
    pub theta: BTreeMap<ThetaKey, GrassmannElement>,
    /// From `det(U^{ac})·det(U^{a}_{1..r})²·det(U^{a^1})⁻²` with forgetful
    /// determinants.
    pub theta_from_determinants: BTreeMap<ThetaKey, GrassmannElement>,
}

fn key_string(key: &[usize]) -> String {
    key.iter().map(|x| x.to_string()).join(",")
}

impl Serialize for ReducedCoordsR1 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let p = self
            .p
            .iter()
            .map(|(k, v)| (format!("P[{}]", key_string(k)), v));
        let ps = self
            .p_star
            .iter()
            .map(|(k, v)| (format!("P*[{}]", key_string(k)), v));
        let th = self
            .theta
            .iter()
            .map(|(k, v)| (format!("theta[{}]", key_string(k)), v));
        s.collect_map(p.chain(ps).chain(th))
    }
}

fn evens(items: &[usize]) -> Vec<ColIndex> {
    items.iter().map(|&a| ColIndex::Even(a)).collect()
}

fn check_shape(plane: &PlaneRep) -> Result<(usize, usize), PlueckerError> {
    let (r, s, n, m) = plane.dims();
    if s != 1 || m != 1 || r == 0 || r >= n {
        return Err(PlueckerError::Shape(format!(
            "expected an r|1 plane in n|1 with 0<r<n, got {r}|{s} in {n}|{m}"
        )));
    }
    Ok((r, n))
}

/// `T^{a|^1}` with `a` in the given order.
pub fn p_coordinate(plane: &PlaneRep, a: &[usize]) -> Result<GrassmannElement, PlueckerError> {
    let mut cols = evens(a);
    cols.push(ColIndex::Odd(1));
    Ok(plane.select(&cols)?.ber()?)
}

/// `T*^{a|c}(T^{a|^1})²` with `a` in the given order.
pub fn theta_by_definition(
    plane: &PlaneRep,
    a: &[usize],
    c: usize,
) -> Result<GrassmannElement, PlueckerError> {
    let mut cols = evens(a);
    cols.push(ColIndex::Even(c));
    let star = plane.select(&cols)?.ber_star()?;
    Ok(&star * &p_coordinate(plane, a)?.square())
}

/// `det(U^{ac}) · det(U^{a}_{1..r})² · det(U^{a^1})⁻²`, determinants taken
/// with parities forgotten and monomial factors in the given order.
pub fn theta_by_determinants(
    plane: &PlaneRep,
    a: &[usize],
    c: usize,
    order: FactorOrder,
) -> Result<GrassmannElement, PlueckerError> {
    let r = a.len();
    let all_rows: Vec<usize> = (0..=r).collect();
    let even_rows: Vec<usize> = (0..r).collect();
    let mut with_c = evens(a);
    with_c.push(ColIndex::Even(c));
    let mut with_hat = evens(a);
    with_hat.push(ColIndex::Odd(1));
    let num = plane
        .minor_matrix(&all_rows, &with_c)
        .det_forgetful_ordered(order)?;
    let body = plane.minor_matrix(&even_rows, &evens(a)).det()?;
    let den = plane
        .minor_matrix(&all_rows, &with_hat)
        .det_forgetful_ordered(order)?;
    let inv = den
        .invert()
        .map_err(|_| PlueckerError::NotInvertible(format!("det U^[{},^1]", key_string(a))))?;
    Ok(&(&num * &body.square()) * &inv.square())
}

impl ReducedCoordsR1 {
    pub fn compute(plane: &PlaneRep) -> Result<Self, PlueckerError> {
        Self::compute_with(plane, true)
    }

    /// As [`compute`](Self::compute); without `determinant_path` the
    /// determinant form of θ is not evaluated and `theta_from_determinants`
    /// stays empty.
    pub fn compute_with(plane: &PlaneRep, determinant_path: bool) -> Result<Self, PlueckerError> {
        let (r, n) = check_shape(plane)?;
        let mut p = BTreeMap::new();
        let mut p_star = BTreeMap::new();
        for a in (1..=n).combinations(r) {
            let value = p_coordinate(plane, &a)?;
            let inv = value
                .invert()
                .map_err(|_| PlueckerError::NotInvertible(format!("P[{}]", key_string(&a))))?;
            let mut cols = evens(&a);
            cols.push(ColIndex::Odd(1));
            let star = plane.select(&cols)?.ber_star()?;
            debug_assert_eq!(star, inv);
            p.insert(a.clone(), value);
            p_star.insert(a, star);
        }
        let keys: Vec<ThetaKey> = (1..=n).combinations(r + 1).collect();
        let mut theta = BTreeMap::new();
        let mut theta_from_determinants = BTreeMap::new();
        for key in keys {
            let (a, c) = key.split_at(r);
            theta.insert(key.clone(), theta_by_definition(plane, a, c[0])?);
            if determinant_path {
                theta_from_determinants.insert(
                    key.clone(),
                    theta_by_determinants(plane, a, c[0], FactorOrder::Columns)?,
                );
            }
        }
        Ok(ReducedCoordsR1 {
            r,
            n,
            generators: plane.generators(),
            p,
            p_star,
            theta,
            theta_from_determinants,
        })
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    /// `P^{a}` for any order of `a` (antisymmetric, zero on repeats).
    pub fn p(&self, a: &[usize]) -> GrassmannElement {
        match antisymmetric_order(a) {
            Some((key, sign)) => signed(&self.p[&key], sign),
            None => GrassmannElement::zero(self.generators),
        }
    }

    /// `θ^{a c}` for any order of its `r+1` indices.
    pub fn theta(&self, indices: &[usize]) -> GrassmannElement {
        match antisymmetric_order(indices) {
            Some((key, sign)) => signed(&self.theta[&key], sign),
            None => GrassmannElement::zero(self.generators),
        }
    }

    /// Products `P^{a}P^{b}` and `θ^{k}P^{b}` over sorted keys. Relation
    /// instances only differ from these by sign.
    fn product_table(&self) -> ProductTable {
        use rayon::prelude::*;
        let pairs: Vec<(&Vec<usize>, &Vec<usize>, bool)> = self
            .p
            .keys()
            .cartesian_product(self.p.keys())
            .map(|(a, b)| (a, b, false))
            .chain(
                self.theta
                    .keys()
                    .cartesian_product(self.p.keys())
                    .map(|(k, b)| (k, b, true)),
            )
            .collect();
        let values: Vec<GrassmannElement> = pairs
            .par_iter()
            .map(|&(a, b, theta)| (if theta { &self.theta[a] } else { &self.p[a] }) * &self.p[b])
            .collect();
        let mut table = ProductTable {
            generators: self.generators,
            pp: HashMap::new(),
            tp: HashMap::new(),
        };
        for ((a, b, theta), v) in pairs.into_iter().zip(values) {
            let map = if theta { &mut table.tp } else { &mut table.pp };
            map.insert((a.clone(), b.clone()), v);
        }
        table
    }

    /// Keys where the two θ computations disagree.
    pub fn path_mismatches(&self) -> Vec<ThetaKey> {
        self.theta
            .iter()
            .filter(|(k, v)| self.theta_from_determinants.get(*k) != Some(v))
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// `P*·P = 1`, the θ path agreement, the even and odd relation families
    /// over all index tuples and, for `r = 2`, the explicit
    /// determinant-form instances.
    pub fn check_relations(&self) -> RelationReport {
        let (r, n) = (self.r, self.n);
        let one = GrassmannElement::one(self.generators);
        let label = |t: &Vec<usize>| t.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let combos: Vec<Vec<usize>> = (1..=n).combinations(r).collect();
        let table = self.product_table();
        let pp = |a: &[usize], b: &[usize]| table.get(false, a, b);
        let tp = |k: &[usize], b: &[usize]| table.get(true, k, b);
        let tuples: Vec<Vec<usize>> = std::iter::repeat_n(1..=n, r)
            .multi_cartesian_product()
            .collect();

        let mut report = run_relation("p_star_inverse", combos.clone(), label, |a| {
            Some((&self.p[a] * &self.p_star[a], one.clone()))
        });
        let keys: Vec<ThetaKey> = self.theta.keys().cloned().collect();
        report.merge(run_relation("theta_paths", keys, label, |k| {
            Some((
                self.theta[k].clone(),
                self.theta_from_determinants[k].clone(),
            ))
        }));

        let pairs: Vec<Vec<usize>> = tuples
            .iter()
            .cartesian_product(&combos)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        report.merge(run_relation("r1_even", pairs.clone(), label, |t| {
            let (a, b) = t.split_at(r);
            let mut lhs = GrassmannElement::zero(self.generators);
            for i in 0..r {
                let mut left = a.to_vec();
                left[0] = b[i];
                let mut right = b.to_vec();
                right[i] = a[0];
                lhs += &pp(&left, &right);
            }
            Some((lhs, pp(a, b)))
        }));
        let triples: Vec<Vec<usize>> = pairs
            .iter()
            .cartesian_product(1..=n)
            .map(|(ab, c)| ab.iter().copied().chain(std::iter::once(c)).collect())
            .collect();
        report.merge(run_relation("r1_odd", triples, label, |t| {
            let (a, rest) = t.split_at(r);
            let (b, c) = (&rest[..r], rest[r]);
            let with = |head: &[usize], last: usize| -> Vec<usize> {
                head.iter().copied().chain(std::iter::once(last)).collect()
            };
            let mut lhs = tp(&with(a, c), b);
            for i in 0..r {
                let mut bc = b.to_vec();
                bc[i] = c;
                lhs -= &tp(&with(a, b[i]), &bc);
            }
            Some((lhs, tp(&with(b, c), a)))
        }));

        if r == 2 {
            let quads: Vec<Vec<usize>> = std::iter::repeat_n(1..=n, 4)
                .multi_cartesian_product()
                .collect();
            report.merge(run_relation("r2_even_minors", quads.clone(), label, |t| {
                let (a1, a2, b1, b2) = (t[0], t[1], t[2], t[3]);
                let lhs = &pp(&[a1, b1], &[a2, b2]) - &pp(&[a1, b2], &[a2, b1]);
                Some((lhs, pp(&[a1, a2], &[b1, b2])))
            }));
            let fives: Vec<Vec<usize>> = quads
                .iter()
                .cartesian_product(1..=n)
                .map(|(q, c)| q.iter().copied().chain(std::iter::once(c)).collect())
                .collect();
            report.merge(run_relation("r2_odd_minors", fives, label, |t| {
                let (a1, a2, b1, b2, c) = (t[0], t[1], t[2], t[3], t[4]);
                let mut lhs = tp(&[a1, a2, c], &[b1, b2]);
                lhs -= &tp(&[a1, a2, b1], &[c, b2]);
                lhs -= &tp(&[a1, a2, b2], &[b1, c]);
                Some((lhs, tp(&[b1, b2, c], &[a1, a2])))
            }));
        }
        report
    }
}

struct ProductTable {
    generators: usize,
    pp: HashMap<(Vec<usize>, Vec<usize>), GrassmannElement>,
    tp: HashMap<(Vec<usize>, Vec<usize>), GrassmannElement>,
}

impl ProductTable {
    /// Signed product for indices in any order; zero on a repeat.
    fn get(&self, theta: bool, a: &[usize], b: &[usize]) -> GrassmannElement {
        match (antisymmetric_order(a), antisymmetric_order(b)) {
            (Some((ka, sa)), Some((kb, sb))) => {
                let map = if theta { &self.tp } else { &self.pp };
                signed(&map[&(ka, kb)], sa * sb)
            }
            _ => GrassmannElement::zero(self.generators),
        }
    }
}

/// Recomputes the reduced coordinates of `g·U` and checks
/// `P' = Ber(g)·P` and `θ' = Ber(g)·θ` at every key.
pub fn scaling_covariance(
    plane: &PlaneRep,
    g: &SuperMatrix,
) -> Result<RelationReport, PlueckerError> {
    let before = ReducedCoordsR1::compute_with(plane, false)?;
    let after = ReducedCoordsR1::compute_with(&plane.left_multiply(g)?, false)?;
    let ber = g.ber()?;
    let label = |k: &Vec<usize>| k.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut report = run_relation(
        "p_covariance",
        before.p.keys().cloned().collect(),
        label,
        |k| Some((after.p[k].clone(), &ber * &before.p[k])),
    );
    report.merge(run_relation(
        "theta_covariance",
        before.theta.keys().cloned().collect(),
        label,
        |k| Some((after.theta[k].clone(), &ber * &before.theta[k])),
    ));
    Ok(report)
}
