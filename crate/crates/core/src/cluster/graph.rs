use super::triangulation::{DecoratedTriangulation, Triangulation};
use super::ClusterError;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Odd,
    Even,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Odd => "odd",
            EdgeKind::Even => "even",
        }
    }
}

/// Undirected edge between vertex indices, `from < to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ExchangeEdge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

/// Decorated triangulations joined by odd and even mutations. Vertices are
/// sorted; edges refer to vertex positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExchangeGraph {
    pub n: usize,
    pub vertices: Vec<DecoratedTriangulation>,
    pub edges: Vec<ExchangeEdge>,
}

/// Triangulations joined by classical flips.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipGraph {
    pub vertices: Vec<Triangulation>,
    pub edges: BTreeSet<(usize, usize)>,
}

fn neighbours(v: &DecoratedTriangulation) -> Vec<(DecoratedTriangulation, EdgeKind)> {
    let mut out: Vec<_> = v
        .odd_moves()
        .into_iter()
        .map(|(_, _, w)| (w, EdgeKind::Odd))
        .collect();
    if let Ok((w, _)) = v.even_move() {
        out.push((w, EdgeKind::Even));
    }
    out
}

/// Closure of all mutations from the canonical seed. Frontiers are expanded
/// in parallel; the result does not depend on scheduling.
pub fn exchange_graph(n: usize) -> Result<ExchangeGraph, ClusterError> {
    let seed = DecoratedTriangulation::canonical_seed(n)?;
    let mut seen = BTreeSet::from([seed.clone()]);
    let mut raw_edges = BTreeSet::new();
    let mut frontier = vec![seed];
    while !frontier.is_empty() {
        let expanded: Vec<_> = frontier
            .par_iter()
            .map(|v| (v.clone(), neighbours(v)))
            .collect();
        let mut next = Vec::new();
        for (v, ns) in expanded {
            for (w, kind) in ns {
                let key = if v < w {
                    (v.clone(), w.clone(), kind)
                } else {
                    (w.clone(), v.clone(), kind)
                };
                raw_edges.insert(key);
                if seen.insert(w.clone()) {
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    let vertices: Vec<DecoratedTriangulation> = seen.into_iter().collect();
    let index: BTreeMap<&DecoratedTriangulation, usize> =
        vertices.iter().enumerate().map(|(k, v)| (v, k)).collect();
    let mut edges: Vec<ExchangeEdge> = raw_edges
        .iter()
        .map(|(a, b, kind)| ExchangeEdge {
            from: index[a],
            to: index[b],
            kind: *kind,
        })
        .collect();
    edges.sort();
    Ok(ExchangeGraph { n, vertices, edges })
}

impl ExchangeGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self, kind: EdgeKind) -> usize {
        self.edges.iter().filter(|e| e.kind == kind).count()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return true;
        }
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
            adj[e.to].push(e.from);
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Forgets markings and odd edges.
    pub fn quotient(&self) -> FlipGraph {
        let vertices: Vec<Triangulation> = self
            .vertices
            .iter()
            .map(|v| v.triangulation().clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<&Triangulation, usize> =
            vertices.iter().enumerate().map(|(k, t)| (t, k)).collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Even)
            .map(|e| {
                let a = index[self.vertices[e.from].triangulation()];
                let b = index[self.vertices[e.to].triangulation()];
                (a.min(b), a.max(b))
            })
            .collect();
        FlipGraph { vertices, edges }
    }

    pub fn to_dot(&self) -> String {
        let mut out = format!("graph exchange_{} {{\n", self.n);
        for (k, v) in self.vertices.iter().enumerate() {
            writeln!(out, "  v{k} [label=\"{}\"];", v.label()).unwrap();
        }
        for e in &self.edges {
            writeln!(
                out,
                "  v{} -- v{} [kind={}];",
                e.from,
                e.to,
                e.kind.as_str()
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }
}
