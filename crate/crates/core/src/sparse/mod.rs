//! Sparse symmetric linear algebra: assembly from triplets, submatrix
//! extraction, products and direct solvers for SPD and saddle-point systems.

mod index_set;
mod ldl;
mod matrix;
pub mod ordering;
mod solve;

pub use index_set::IndexSet;
pub use ldl::{LdlFactor, PivotPolicy};
pub use matrix::SparseMatrix;
pub use solve::{
    solve_saddle, solve_spd, SaddleSolution, SaddleSolver, SpdSolver, SADDLE_RESIDUAL_TOL,
    SPD_RESIDUAL_TOL,
};
