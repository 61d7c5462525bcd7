//! Localized orthogonal decomposition (LOD) for discrete networks.
//!
//! A network with connectivity matrix `K` is represented on a coarse
//! quadrilateral grid by bilinear basis vectors that are corrected, patch by
//! patch, to be `K`-orthogonal to the fine detail space. The crate contains
//! the sparse machinery, a 2D fiber-network elasticity model, the coarse grid
//! operators, the multiscale solver and an experiment harness.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the experiments use.

// NaN must fail validity checks, so `!(a > b)` is deliberate
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coarse;
mod error;
pub mod experiment;
pub mod lod;
pub mod models;
pub mod network;
mod scalar;
pub mod sparse;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type SparseMatrix64 = sparse::SparseMatrix<f64>;
pub type Network64 = network::Network<f64>;
pub type EdgeAttributes64 = network::EdgeAttributes<f64>;
pub type PairAttributes64 = network::PairAttributes<f64>;
pub type BoundaryConditions64 = network::BoundaryConditions<f64>;
pub type CoarseGrid64 = coarse::CoarseGrid<f64>;
pub type CoarseOperators64 = coarse::CoarseOperators<f64>;
pub type Correctors64 = lod::Correctors<f64>;
pub type MultiscaleBasis64 = lod::MultiscaleBasis<f64>;
pub type Discretization64 = lod::Discretization<f64>;
pub type Solution64 = lod::Solution<f64>;

pub type SparseMatrix32 = sparse::SparseMatrix<f32>;
pub type Network32 = network::Network<f32>;
pub type CoarseOperators32 = coarse::CoarseOperators<f32>;
pub type Discretization32 = lod::Discretization<f32>;
