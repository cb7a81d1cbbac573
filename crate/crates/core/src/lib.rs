//! Exact arithmetic for super Plücker coordinates.
//!
//! Everything is evaluated in a finitely generated Grassmann algebra Λ_N
//! over the rationals: Berezinians of parity-labelled matrices, super
//! Plücker coordinates and their relations, mutations of the decorated
//! triangulation cluster structure on `Gr_{2|0}(n|1)`, and the super
//! Ptolemy transformation.

pub mod cluster;
pub mod grassmann;
pub mod pluecker;
pub mod ptolemy;
pub mod rational;
pub mod sample;
pub mod supermatrix;

pub use grassmann::{AlgebraError, GrassmannElement, Parity, ParityClass};
pub use rational::Rational;
pub use sample::{derive_seed, Sampler, SamplingProfile};
pub use supermatrix::{FactorOrder, MatrixError, SuperMatrix};
