use super::ClusterError;
use serde::{Serialize, Serializer};
use std::collections::{BTreeSet, VecDeque};
use std::fmt;

/// A proper diagonal `(i, j)`, `i < j`, of an n-gon with vertices `1..=n`.
/// Serializes as `[i, j]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Diagonal(usize, usize);

/// Whether `{i, j}` is a side of the n-gon.
pub fn is_side(n: usize, i: usize, j: usize) -> bool {
    let (i, j) = (i.min(j), i.max(j));
    j == i + 1 || (i == 1 && j == n)
}

impl Diagonal {
    pub fn new(n: usize, i: usize, j: usize) -> Result<Self, ClusterError> {
        let (a, b) = (i.min(j), i.max(j));
        if a == 0 || b > n || b - a < 2 || (a == 1 && b == n) {
            return Err(ClusterError::NotADiagonal { n, i, j });
        }
        Ok(Diagonal(a, b))
    }

    pub fn endpoints(self) -> (usize, usize) {
        (self.0, self.1)
    }

    pub fn contains(self, v: usize) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint that is not `v`.
    pub fn other(self, v: usize) -> Option<usize> {
        if self.0 == v {
            Some(self.1)
        } else if self.1 == v {
            Some(self.0)
        } else {
            None
        }
    }

    /// Strict interior crossing.
    pub fn crosses(self, other: Diagonal) -> bool {
        let (a, b) = self.endpoints();
        let (c, d) = other.endpoints();
        (a < c && c < b && b < d) || (c < a && a < d && d < b)
    }
}

impl fmt::Display for Diagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// The quadrilateral around a diagonal: vertices in cyclic (= ascending)
/// order, the diagonal itself and the one it flips to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quad {
    pub vertices: [usize; 4],
    pub diagonal: Diagonal,
    pub target: Diagonal,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangulation {
    n: usize,
    diagonals: BTreeSet<Diagonal>,
}

impl Serialize for Triangulation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(&self.diagonals)
    }
}

impl Triangulation {
    pub fn new(
        n: usize,
        diagonals: impl IntoIterator<Item = Diagonal>,
    ) -> Result<Self, ClusterError> {
        if n < 4 {
            return Err(ClusterError::PolygonTooSmall(n));
        }
        let diagonals: BTreeSet<Diagonal> = diagonals.into_iter().collect();
        if let Some(d) = diagonals.iter().find(|d| d.1 > n) {
            return Err(ClusterError::NotADiagonal { n, i: d.0, j: d.1 });
        }
        if diagonals.len() != n - 3 {
            return Err(ClusterError::InvalidTriangulation(format!(
                "{} diagonals, expected {}",
                diagonals.len(),
                n - 3
            )));
        }
        for d in &diagonals {
            if let Some(e) = diagonals.iter().find(|e| d.crosses(**e)) {
                return Err(ClusterError::InvalidTriangulation(format!(
                    "{d} crosses {e}"
                )));
            }
        }
        Ok(Triangulation { n, diagonals })
    }

    /// All diagonals from vertex 1.
    pub fn fan(n: usize) -> Result<Self, ClusterError> {
        let diagonals = (3..n)
            .map(|k| Diagonal::new(n, 1, k))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n, diagonals)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diagonals(&self) -> &BTreeSet<Diagonal> {
        &self.diagonals
    }

    pub fn contains(&self, d: Diagonal) -> bool {
        self.diagonals.contains(&d)
    }

    /// Side of the polygon or diagonal of the triangulation.
    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        is_side(self.n, i, j) || Diagonal::new(self.n, i, j).is_ok_and(|d| self.contains(d))
    }

    pub fn quad_of(&self, d: Diagonal) -> Result<Quad, ClusterError> {
        if !self.contains(d) {
            return Err(ClusterError::NotInTriangulation(d));
        }
        let (i, j) = d.endpoints();
        let apex = |k: &usize| self.is_edge(i, *k) && self.is_edge(*k, j);
        let inner = (i + 1..j).find(apex);
        let outer = (1..i).chain(j + 1..=self.n).find(apex);
        let (Some(k), Some(l)) = (inner, outer) else {
            return Err(ClusterError::InvalidTriangulation(format!(
                "no quadrilateral around {d}"
            )));
        };
        let mut vertices = [i, j, k, l];
        vertices.sort_unstable();
        Ok(Quad {
            vertices,
            diagonal: d,
            target: Diagonal::new(self.n, k, l)?,
        })
    }

    /// Classical flip of `d`; returns the new triangulation and quad.
    pub fn flip(&self, d: Diagonal) -> Result<(Triangulation, Quad), ClusterError> {
        let quad = self.quad_of(d)?;
        let mut diagonals = self.diagonals.clone();
        diagonals.remove(&d);
        diagonals.insert(quad.target);
        Ok((
            Triangulation {
                n: self.n,
                diagonals,
            },
            quad,
        ))
    }
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.diagonals.iter().map(|d| d.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn triangulate(verts: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if verts.len() <= 3 {
        return vec![Vec::new()];
    }
    let last = verts.len() - 1;
    let mut out = Vec::new();
    for k in 1..last {
        let left = triangulate(&verts[..=k]);
        let right = triangulate(&verts[k..]);
        for l in &left {
            for r in &right {
                let mut ds = l.clone();
                ds.extend(r);
                if k > 1 {
                    ds.push((verts[0], verts[k]));
                }
                if k < last - 1 {
                    ds.push((verts[k], verts[last]));
                }
                out.push(ds);
            }
        }
    }
    out
}

/// Every triangulation of the n-gon, sorted.
pub fn enumerate_triangulations(n: usize) -> Result<Vec<Triangulation>, ClusterError> {
    if n < 4 {
        return Err(ClusterError::PolygonTooSmall(n));
    }
    let verts: Vec<usize> = (1..=n).collect();
    let mut all: Vec<Triangulation> = triangulate(&verts)
        .into_iter()
        .map(|ds| Triangulation {
            n,
            diagonals: ds.into_iter().map(|(i, j)| Diagonal(i, j)).collect(),
        })
        .collect();
    all.sort();
    Ok(all)
}

/// A triangulation with one diagonal's endpoints marked.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DecoratedTriangulation {
    #[serde(rename = "diagonals")]
    triangulation: Triangulation,
    marked: Diagonal,
}

impl DecoratedTriangulation {
    pub fn new(triangulation: Triangulation, marked: Diagonal) -> Result<Self, ClusterError> {
        if !triangulation.contains(marked) {
            return Err(ClusterError::NotInTriangulation(marked));
        }
        Ok(DecoratedTriangulation {
            triangulation,
            marked,
        })
    }

    /// Fan at vertex 1 with `(1,3)` marked.
    pub fn canonical_seed(n: usize) -> Result<Self, ClusterError> {
        Self::new(Triangulation::fan(n)?, Diagonal::new(n, 1, 3)?)
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.triangulation
    }

    pub fn marked(&self) -> Diagonal {
        self.marked
    }

    pub fn n(&self) -> usize {
        self.triangulation.n
    }

    /// Odd mutation moving marked endpoint `from` to `to`.
    pub fn odd_move(&self, from: usize, to: usize) -> Result<Self, ClusterError> {
        let keep = self
            .marked
            .other(from)
            .ok_or(ClusterError::NotMarked(from))?;
        let illegal = ClusterError::IllegalOddMutation { from, to };
        if to == from {
            return Err(illegal);
        }
        let target = Diagonal::new(self.n(), keep, to).map_err(|_| illegal.clone())?;
        if !self.triangulation.contains(target) {
            return Err(illegal);
        }
        Ok(DecoratedTriangulation {
            triangulation: self.triangulation.clone(),
            marked: target,
        })
    }

    /// All legal odd mutations as `(from, to, result)`, in a fixed order.
    pub fn odd_moves(&self) -> Vec<(usize, usize, DecoratedTriangulation)> {
        let (a, b) = self.marked.endpoints();
        let mut out = Vec::new();
        for from in [a, b] {
            for to in 1..=self.n() {
                if let Ok(next) = self.odd_move(from, to) {
                    out.push((from, to, next));
                }
            }
        }
        out
    }

    /// Flip the marked diagonal, carrying the marking along.
    pub fn even_move(&self) -> Result<(Self, Quad), ClusterError> {
        let (triangulation, quad) = self.triangulation.flip(self.marked)?;
        Ok((
            DecoratedTriangulation {
                triangulation,
                marked: quad.target,
            },
            quad,
        ))
    }

    /// `T:{1-3,1-4};M:1-3`.
    pub fn label(&self) -> String {
        format!("T:{};M:{}", self.triangulation, self.marked)
    }
}

/// Whether every diagonal of `t` can be marked by a sequence of odd
/// mutations (vacuously true when `t` has no diagonals).
pub fn marking_reachability(t: &Triangulation) -> bool {
    let Some(&start) = t.diagonals.iter().next() else {
        return true;
    };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(d) = queue.pop_front() {
        let dec = DecoratedTriangulation {
            triangulation: t.clone(),
            marked: d,
        };
        for (_, _, next) in dec.odd_moves() {
            if seen.insert(next.marked) {
                queue.push_back(next.marked);
            }
        }
    }
    seen.len() == t.diagonals.len()
}
