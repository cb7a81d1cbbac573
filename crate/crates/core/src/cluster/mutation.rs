use super::triangulation::{is_side, DecoratedTriangulation, Diagonal, Quad};
use super::ClusterError;
use crate::grassmann::{GrassmannElement, Parity};
use crate::pluecker::{Gr20Coords, PlaneRep};
use crate::sample::SamplingProfile;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// One step of a mutation walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Move {
    Odd { from: usize, to: usize },
    Even,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecoratedCluster {
    decoration: DecoratedTriangulation,
    even_vars: BTreeMap<Diagonal, GrassmannElement>,
    /// Keyed by `(i, j)`, `i < j`.
    frozen_vars: BTreeMap<(usize, usize), GrassmannElement>,
    odd_vars: BTreeMap<usize, GrassmannElement>,
}

fn invertible_even(v: &GrassmannElement) -> bool {
    v.parity().admits(Parity::Even) && v.invert().is_ok()
}

fn sides(n: usize) -> Vec<(usize, usize)> {
    (1..n)
        .map(|i| (i, i + 1))
        .chain(std::iter::once((1, n)))
        .collect()
}

fn name(i: usize, j: usize) -> String {
    format!("T[{i},{j}]")
}

impl DecoratedCluster {
    pub fn new(
        decoration: DecoratedTriangulation,
        even_vars: BTreeMap<Diagonal, GrassmannElement>,
        frozen_vars: BTreeMap<(usize, usize), GrassmannElement>,
        odd_vars: BTreeMap<usize, GrassmannElement>,
    ) -> Result<Self, ClusterError> {
        let n = decoration.n();
        let bad = |m: String| Err(ClusterError::InvalidCluster(m));
        if !even_vars
            .keys()
            .eq(decoration.triangulation().diagonals().iter())
        {
            return bad("even variables must match the diagonals".into());
        }
        if !frozen_vars.keys().copied().eq({
            let mut s = sides(n);
            s.sort_unstable();
            s
        }) {
            return bad("frozen variables must match the polygon sides".into());
        }
        let (a, b) = decoration.marked().endpoints();
        if !odd_vars.keys().copied().eq([a, b]) {
            return bad("odd variables must sit at the marked endpoints".into());
        }
        if let Some(d) = even_vars
            .iter()
            .find(|(_, v)| !invertible_even(v))
            .map(|(d, _)| d)
        {
            return Err(ClusterError::NotInvertible(name(
                d.endpoints().0,
                d.endpoints().1,
            )));
        }
        if let Some((i, j)) = frozen_vars
            .iter()
            .find(|(_, v)| !invertible_even(v))
            .map(|(k, _)| *k)
        {
            return Err(ClusterError::NotInvertible(name(i, j)));
        }
        if odd_vars.values().any(|v| !v.parity().admits(Parity::Odd)) {
            return bad("odd variables must be odd".into());
        }
        Ok(DecoratedCluster {
            decoration,
            even_vars,
            frozen_vars,
            odd_vars,
        })
    }

    pub fn decoration(&self) -> &DecoratedTriangulation {
        &self.decoration
    }

    pub fn even_vars(&self) -> &BTreeMap<Diagonal, GrassmannElement> {
        &self.even_vars
    }

    pub fn frozen_vars(&self) -> &BTreeMap<(usize, usize), GrassmannElement> {
        &self.frozen_vars
    }

    pub fn odd_vars(&self) -> &BTreeMap<usize, GrassmannElement> {
        &self.odd_vars
    }

    fn n(&self) -> usize {
        self.decoration.n()
    }

    /// `T^{ij}` for an edge of the current triangulation, any order.
    pub fn edge_value(&self, i: usize, j: usize) -> Option<GrassmannElement> {
        let (a, b) = (i.min(j), i.max(j));
        let v = if is_side(self.n(), a, b) {
            self.frozen_vars.get(&(a, b))?.clone()
        } else {
            self.even_vars
                .get(&Diagonal::new(self.n(), a, b).ok()?)?
                .clone()
        };
        Some(if i > j { -v } else { v })
    }

    /// `T^{ij}` expressed through the cluster: directly for an edge, else by
    /// classical flips towards `(i, j)` on a scratch copy of the even
    /// variables.
    pub fn t_value(&self, i: usize, j: usize) -> Result<GrassmannElement, ClusterError> {
        if i == j {
            return Ok(GrassmannElement::zero(self.generators()));
        }
        if let Some(v) = self.edge_value(i, j) {
            return Ok(v);
        }
        let target = Diagonal::new(self.n(), i, j)?;
        let mut tri = self.decoration.triangulation().clone();
        let mut vars = self.even_vars.clone();
        while !tri.contains(target) {
            // the diagonal closing the triangle at i that the segment enters first
            let quad = tri
                .diagonals()
                .iter()
                .filter(|d| d.crosses(target))
                .map(|d| tri.quad_of(*d))
                .find(|q| q.as_ref().is_ok_and(|q| q.vertices.contains(&i)))
                .expect("a crossing diagonal next to i exists")?;
            let value = exchange_even(&quad, |a, b| {
                lookup(&self.frozen_vars, &vars, self.n(), a, b)
            })?;
            vars.remove(&quad.diagonal);
            vars.insert(quad.target, value);
            tri = tri.flip(quad.diagonal)?.0;
        }
        let v = vars[&target].clone();
        Ok(if i > j { -v } else { v })
    }

    fn generators(&self) -> usize {
        self.frozen_vars
            .values()
            .next()
            .map_or(0, |v| v.generator_count())
    }

    /// Moves the odd variable at marked endpoint `from` to `to`.
    pub fn odd_mutation(&self, from: usize, to: usize) -> Result<Self, ClusterError> {
        let decoration = self.decoration.odd_move(from, to)?;
        let keep = self
            .decoration
            .marked()
            .other(from)
            .expect("checked by odd_move");
        let value = solve_theta([from, keep, to], to, &self.odd_vars, |a, b| {
            self.t_value(a, b)
        })?;
        let odd_vars = BTreeMap::from([(keep, self.odd_vars[&keep].clone()), (to, value)]);
        Ok(DecoratedCluster {
            decoration,
            even_vars: self.even_vars.clone(),
            frozen_vars: self.frozen_vars.clone(),
            odd_vars,
        })
    }

    /// Flips the marked diagonal; the new even variable and both new odd
    /// variables come from the exchange relations of the quadrilateral.
    pub fn even_mutation(&self) -> Result<Self, ClusterError> {
        let (decoration, quad) = self.decoration.even_move()?;
        let get = |a: usize, b: usize| {
            self.edge_value(a, b)
                .ok_or_else(|| ClusterError::InvalidCluster(format!("{} missing", name(a, b))))
        };
        let t_new = exchange_even(&quad, get)?;
        let (p, r) = quad.diagonal.endpoints();
        let (q, s) = quad.target.endpoints();
        let mut odd_vars = BTreeMap::new();
        for w in [q, s] {
            odd_vars.insert(w, solve_theta([p, r, w], w, &self.odd_vars, get)?);
        }
        let mut even_vars = self.even_vars.clone();
        even_vars.remove(&quad.diagonal);
        even_vars.insert(quad.target, t_new);
        Ok(DecoratedCluster {
            decoration,
            even_vars,
            frozen_vars: self.frozen_vars.clone(),
            odd_vars,
        })
    }

    pub fn apply(&self, mv: Move) -> Result<Self, ClusterError> {
        match mv {
            Move::Odd { from, to } => self.odd_mutation(from, to),
            Move::Even => self.even_mutation(),
        }
    }
}

fn lookup(
    frozen: &BTreeMap<(usize, usize), GrassmannElement>,
    vars: &BTreeMap<Diagonal, GrassmannElement>,
    n: usize,
    a: usize,
    b: usize,
) -> Result<GrassmannElement, ClusterError> {
    let (i, j) = (a.min(b), a.max(b));
    let v = if is_side(n, i, j) {
        frozen.get(&(i, j))
    } else {
        Diagonal::new(n, i, j).ok().and_then(|d| vars.get(&d))
    };
    let v = v
        .ok_or_else(|| ClusterError::InvalidCluster(format!("{} missing", name(i, j))))?
        .clone();
    Ok(if a > b { -v } else { v })
}

/// New diagonal of a flip from `T^{pr}T^{qs} = T^{pq}T^{rs} + T^{ps}T^{qr}`,
/// `p < q < r < s`.
fn exchange_even(
    quad: &Quad,
    get: impl Fn(usize, usize) -> Result<GrassmannElement, ClusterError>,
) -> Result<GrassmannElement, ClusterError> {
    let [p, q, r, s] = quad.vertices;
    let (i, j) = quad.diagonal.endpoints();
    let old = get(i, j)?;
    let inv = old
        .invert()
        .map_err(|_| ClusterError::NotInvertible(name(i, j)))?;
    let sum = &(&get(p, q)? * &get(r, s)?) + &(&get(p, s)? * &get(q, r)?);
    Ok(&sum * &inv)
}

/// Solves `T^{ab}θ^c = T^{ac}θ^b + T^{cb}θ^a` (`a < b < c` the sorted
/// `triple`) for `θ^unknown`, the other two θ being known.
fn solve_theta(
    triple: [usize; 3],
    unknown: usize,
    known: &BTreeMap<usize, GrassmannElement>,
    t: impl Fn(usize, usize) -> Result<GrassmannElement, ClusterError>,
) -> Result<GrassmannElement, ClusterError> {
    let mut v = triple;
    v.sort_unstable();
    let [a, b, c] = v;
    // T^{ab}θ^c − T^{ac}θ^b − T^{cb}θ^a = 0
    let coeffs = [(a, -t(c, b)?), (b, -t(a, c)?), (c, t(a, b)?)];
    let mut rest = GrassmannElement::zero(coeffs[0].1.generator_count());
    let mut lead = None;
    for (idx, coeff) in coeffs {
        if idx == unknown {
            lead = Some(coeff);
        } else {
            rest += &(&coeff * &known[&idx]);
        }
    }
    let lead = lead.expect("unknown is in the triple");
    let inv = lead.invert().map_err(|_| {
        let others: Vec<usize> = v.iter().copied().filter(|&x| x != unknown).collect();
        ClusterError::NotInvertible(name(others[0], others[1]))
    })?;
    Ok(-(&rest * &inv))
}

/// Cluster variables of `decoration` read off the coordinates of a plane.
pub fn ground_truth_cluster(
    coords: &Gr20Coords,
    decoration: &DecoratedTriangulation,
) -> Result<DecoratedCluster, ClusterError> {
    if coords.n != decoration.n() {
        return Err(ClusterError::InvalidCluster(format!(
            "plane in {}|1, polygon with {} vertices",
            coords.n,
            decoration.n()
        )));
    }
    let even_vars = decoration
        .triangulation()
        .diagonals()
        .iter()
        .map(|d| (*d, coords.t(d.endpoints().0, d.endpoints().1)))
        .collect();
    let frozen_vars = sides(coords.n)
        .into_iter()
        .map(|(i, j)| ((i, j), coords.t(i, j)))
        .collect();
    let (a, b) = decoration.marked().endpoints();
    let odd_vars = [a, b]
        .into_iter()
        .map(|v| (v, coords.theta(v).clone()))
        .collect();
    DecoratedCluster::new(decoration.clone(), even_vars, frozen_vars, odd_vars)
}

/// A plane of `Gr_{2|0}(n|1)` whose `T^{ab}` are all invertible.
pub fn sample_generic_plane(seed: u64, n: usize) -> Result<PlaneRep, ClusterError> {
    if n < 4 {
        return Err(ClusterError::PolygonTooSmall(n));
    }
    Ok(PlaneRep::sample_generic(
        seed,
        (2, 0, n, 1),
        SamplingProfile::default(),
        100,
        |p| Gr20Coords::from_plane(p).is_ok_and(|c| c.t.values().all(|v| v.invert().is_ok())),
    )?)
}

/// `count` uniformly chosen legal moves starting at `start`.
pub fn random_moves(start: &DecoratedTriangulation, count: usize, seed: u64) -> Vec<Move> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = start.clone();
    let mut moves = Vec::with_capacity(count);
    for _ in 0..count {
        let mut options: Vec<(Move, DecoratedTriangulation)> = current
            .odd_moves()
            .into_iter()
            .map(|(from, to, next)| (Move::Odd { from, to }, next))
            .collect();
        if let Ok((next, _)) = current.even_move() {
            options.push((Move::Even, next));
        }
        let (mv, next) = options
            .choose(&mut rng)
            .expect("every decoration has an even move")
            .clone();
        moves.push(mv);
        current = next;
    }
    moves
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub step: usize,
    pub variable: String,
    pub expected: GrassmannElement,
    pub found: GrassmannElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkReport {
    pub steps: usize,
    pub final_decoration: DecoratedTriangulation,
    pub discrepancy: Option<Discrepancy>,
}

impl WalkReport {
    pub fn is_consistent(&self) -> bool {
        self.discrepancy.is_none()
    }
}

fn compare(step: usize, cluster: &DecoratedCluster, coords: &Gr20Coords) -> Option<Discrepancy> {
    let evens = cluster.even_vars.iter().map(|(d, v)| (d.endpoints(), v));
    let frozen = cluster.frozen_vars.iter().map(|(k, v)| (*k, v));
    for ((i, j), found) in evens.chain(frozen) {
        let expected = coords.t(i, j);
        if &expected != found {
            return Some(Discrepancy {
                step,
                variable: name(i, j),
                expected,
                found: found.clone(),
            });
        }
    }
    for (v, found) in &cluster.odd_vars {
        if coords.theta(*v) != found {
            return Some(Discrepancy {
                step,
                variable: format!("theta[{v}]"),
                expected: coords.theta(*v).clone(),
                found: found.clone(),
            });
        }
    }
    None
}

/// Applies `moves` to the ground-truth cluster of `seed` and compares every
/// variable with the plane's coordinates after each step. Stops at the
/// first discrepancy.
pub fn verify_walk(
    plane: &PlaneRep,
    seed: &DecoratedTriangulation,
    moves: &[Move],
) -> Result<WalkReport, ClusterError> {
    let coords = Gr20Coords::from_plane(plane)?;
    let mut cluster = ground_truth_cluster(&coords, seed)?;
    for (k, mv) in moves.iter().enumerate() {
        cluster = cluster.apply(*mv)?;
        if let Some(d) = compare(k + 1, &cluster, &coords) {
            return Ok(WalkReport {
                steps: k + 1,
                final_decoration: cluster.decoration,
                discrepancy: Some(d),
            });
        }
    }
    Ok(WalkReport {
        steps: moves.len(),
        final_decoration: cluster.decoration,
        discrepancy: None,
    })
}
