//! Lipschitz extension of finite map data, with the convex-analysis and convex-geometry
//! machinery it rests on.

pub mod convex_sets;
pub mod datagen;
pub mod error;
pub mod extension;
pub mod functions;
pub mod geometry;
pub mod helly;
pub mod monotone;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use geometry::{Ball, Polytope, SimplexWeights, VectorN};
pub use solvers::{SolveReport, SolverConfig};
