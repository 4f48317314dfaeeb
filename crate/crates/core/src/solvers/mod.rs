//! Deterministic convex solvers.

mod cutting;
mod golden;
mod joint;
mod polyak;
pub mod qp;
mod simplex_qp;

pub use cutting::{minimize_over_box, CutReport, OracleValue};
pub use golden::golden_section;
pub use joint::{joint_descent, JointEval};
pub use polyak::polyak_subgradient;
pub use simplex_qp::{minimize_quadratic_over_simplex, nearest_in_hull, solve_dense as simplex_qp_dense, DenseQ};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: 1e-9, max_iters: 200_000, seed: 0 }
    }
}

impl SolverConfig {
    pub fn with_tol(self, tol: f64) -> Self {
        SolverConfig { tol, ..self }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if !(self.tol > 0.0) || self.max_iters == 0 {
            return Err(crate::Error::Invalid("config needs tol > 0 and max_iters >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a solve. `argmin` holds either a point or simplex weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub argmin: Vec<f64>,
    pub value: f64,
    pub residual: f64,
    pub iters: usize,
    pub converged: bool,
}
