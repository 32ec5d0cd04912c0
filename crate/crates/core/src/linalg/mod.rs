//! Sparse storage and the two solver contracts used by the time stepper:
//! an SPD solve for transport and a zero-mean saddle-point solve for Darcy.

pub mod dense;
pub mod krylov;
pub mod saddle;
pub mod sparse;

pub use dense::DenseMatrix;
pub use saddle::{saddle_solve, SaddleSolution, ZeroMeanConstraint};
pub use sparse::SparseMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preconditioner {
    None,
    #[default]
    Diagonal,
}

/// How the bordered Darcy system is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SaddleMethod {
    /// Sparse LU of the bordered matrix.
    #[default]
    SparseLu,
    /// Preconditioned MINRES on the bordered matrix.
    Minres,
    /// Dense LU; only for systems with at most [`DENSE_LIMIT`] unknowns.
    DenseLu,
}

pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Defaults to ten times the system size.
    pub max_iterations: Option<usize>,
    pub preconditioner: Preconditioner,
    pub saddle_method: SaddleMethod,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_iterations: None,
            preconditioner: Preconditioner::Diagonal,
            saddle_method: SaddleMethod::SparseLu,
        }
    }
}

impl SolverConfig {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        SolverConfig { rel_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "relative tolerance must lie in (0, 1), got {}",
                self.rel_tol
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidArgument("iteration budget must be at least 1".into()));
        }
        Ok(())
    }

    pub fn max_iterations(&self, n: usize) -> usize {
        self.max_iterations.unwrap_or(10 * n.max(1))
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Solves `A x = b` for symmetric positive definite `A` with conjugate
/// gradients; `||A x - b|| <= rel_tol ||b|| + abs_tol` on success.
pub fn spd_solve(a: &SparseMatrix, b: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    krylov::conjugate_gradient(a, b, None, cfg)
}

/// As [`spd_solve`] with an initial guess.
pub fn spd_solve_from(a: &SparseMatrix, b: &[f64], x0: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    krylov::conjugate_gradient(a, b, Some(x0), cfg)
}
