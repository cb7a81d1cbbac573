//! Decorated triangulations of the n-gon and the super cluster structure
//! on `Gr_{2|0}(n|1)`.
//!
//! A cluster holds `T^{ij}` for the diagonals of a triangulation, frozen
//! `T^{ij}` for the polygon sides and two odd variables `θ^a, θ^b` at the
//! endpoints of the marked diagonal.

mod graph;
mod mutation;
mod triangulation;

pub use graph::{exchange_graph, EdgeKind, ExchangeEdge, ExchangeGraph, FlipGraph};
pub use mutation::{
    ground_truth_cluster, random_moves, sample_generic_plane, verify_walk, DecoratedCluster,
    Discrepancy, Move, WalkReport,
};
pub use triangulation::{
    enumerate_triangulations, is_side, marking_reachability, DecoratedTriangulation, Diagonal,
    Quad, Triangulation,
};

use crate::grassmann::AlgebraError;
use crate::pluecker::PlueckerError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("polygon needs n >= 4, got {0}")]
    PolygonTooSmall(usize),
    #[error("({i},{j}) is not a proper diagonal of the {n}-gon")]
    NotADiagonal { n: usize, i: usize, j: usize },
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("diagonal {0} is not in the triangulation")]
    NotInTriangulation(Diagonal),
    #[error("vertex {0} is not a marked endpoint")]
    NotMarked(usize),
    #[error("odd mutation {from} -> {to} does not land on a diagonal of the triangulation")]
    IllegalOddMutation { from: usize, to: usize },
    #[error("invalid cluster: {0}")]
    InvalidCluster(String),
    #[error("{0} is not invertible")]
    NotInvertible(String),
    #[error(transparent)]
    Pluecker(#[from] PlueckerError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[cfg(test)]
mod tests;
