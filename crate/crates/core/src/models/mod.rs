//! Connectivity matrices: the three force laws of the fiber elasticity
//! model, the mapping from Lamé fields to model coefficients, and a weighted
//! graph Laplacian for scalar (`d = 1`) networks.

mod assembly;
mod elements;
mod lame;

pub use assembly::{
    assemble_elasticity, assemble_laplacian, elasticity_elements, laplacian_elements, ElementSource,
};
pub use elements::{
    delta_length, edge_geometry, force_angular, force_extension, force_poisson, EdgeGeometry,
    ElementMatrix,
};
pub use lame::{map_lame, LameField, Section};
