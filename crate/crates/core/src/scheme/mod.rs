//! Fully discrete linearized backward Euler Galerkin-mixed scheme.
//!
//! Each step solves two linear problems in sequence:
//!
//! 1. Darcy, with the viscosity lagged at `C^n`:
//!    `(μ(C^n)/k U, v) - (P, div v) = 0`, `(div U, φ) = (q^I - q^P, φ)`,
//!    with `U · n = 0` imposed strongly and `P` of zero mean.
//! 2. Transport, with the fresh velocity `U^{n+1}` in the dispersion tensor
//!    and the lagged gradient `∇C^n` in the convection term:
//!    `(Φ (C - C^n)/τ, φ) + (D(U) ∇C, ∇φ) + (U · ∇C^n, φ) + (q^P C, φ) = (ĉ q^I, φ)`.

mod darcy;
mod transport;

use std::ops::Range;
use std::sync::Arc;

use rayon::prelude::*;

pub use darcy::{assemble_darcy, divergence_residual, solve_darcy, DarcySystem};
pub use transport::{assemble_transport, solve_transport};

use crate::error::{Error, Result};
use crate::fem::{interpolate_nodal, quadrature_rule, DofMap, FeSpace, QuadRule, Tabulation};
use crate::geometry::{CellMap, Point};
use crate::linalg::{SolverConfig, ZeroMeanConstraint};
use crate::mesh::Mesh;
use crate::problem::{Coefficients, ManufacturedCase};

/// Cells per assembly work item. Fixed so the merge order of element
/// contributions does not depend on the thread count.
const CHUNK: usize = 128;

/// A quadrature rule with every space tabulated on it and the mapped
/// physical points of every cell (`points[c * n_q + q]`).
#[derive(Debug, Clone)]
pub struct FormRule {
    pub rule: QuadRule,
    pub concentration: Tabulation,
    pub velocity: Tabulation,
    pub pressure: Tabulation,
    pub points: Vec<Point>,
}

impl FormRule {
    fn new(dim: usize, degree: usize, spaces: [FeSpace; 3], maps: &[CellMap]) -> Result<Self> {
        let rule = quadrature_rule(dim, degree)?;
        let points = maps
            .iter()
            .flat_map(|m| rule.points.iter().map(move |p| m.to_physical(p)))
            .collect();
        Ok(FormRule {
            concentration: Tabulation::new(spaces[0], dim, &rule.points),
            velocity: Tabulation::new(spaces[1], dim, &rule.points),
            pressure: Tabulation::new(spaces[2], dim, &rule.points),
            rule,
            points,
        })
    }

    pub fn n_points(&self) -> usize {
        self.rule.points.len()
    }

    #[inline]
    pub fn point(&self, c: usize, q: usize) -> &Point {
        &self.points[c * self.n_points() + q]
    }
}

#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    /// Concentration degree; the mixed spaces use `k = r - 1`.
    pub r: usize,
    pub concentration: DofMap,
    pub velocity: DofMap,
    pub pressure: DofMap,
    pub maps: Vec<CellMap>,
    /// Velocity mass and divergence forms.
    pub darcy_rule: FormRule,
    /// Transport mass, stiffness and convection forms.
    pub transport_rule: FormRule,
    /// Source loads and error norms.
    pub load_rule: FormRule,
    pub coefficients: Coefficients,
    pub tau: f64,
    pub n_steps: usize,
    pub final_time: f64,
    pub solver: SolverConfig,
    /// Velocity dof -> index among the unknowns, `None` on boundary facets.
    pub free_velocity: Vec<Option<usize>>,
    pub n_free_velocity: usize,
    pub constraint: ZeroMeanConstraint,
    pool: Option<Arc<rayon::ThreadPool>>,
}

impl Discretization {
    /// Builds the spaces, rules and time grid. `tau` must divide
    /// `final_time` into a whole number of steps (within 1e-12).
    pub fn new(mesh: Mesh, r: usize, coefficients: Coefficients, tau: f64, final_time: f64) -> Result<Self> {
        let dim = mesh.dim();
        if !(r == 1 || (r == 2 && dim == 2)) {
            return Err(Error::Unsupported(format!("concentration degree {r} in dimension {dim}")));
        }
        if !(tau > 0.0 && tau.is_finite() && final_time > 0.0 && final_time.is_finite()) {
            return Err(Error::InvalidArgument(format!("time step {tau} and final time {final_time}")));
        }
        let n_steps = (final_time / tau).round() as usize;
        if n_steps == 0 || (n_steps as f64 * tau - final_time).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "time step {tau} does not divide the final time {final_time}"
            )));
        }
        let k = r - 1;
        let spaces = [FeSpace::Lagrange(r), FeSpace::RaviartThomas(k), FeSpace::DiscontinuousLagrange(k)];
        let concentration = DofMap::new(&mesh, spaces[0])?;
        let velocity = DofMap::new(&mesh, spaces[1])?;
        let pressure = DofMap::new(&mesh, spaces[2])?;
        let maps = (0..mesh.n_cells()).map(|c| CellMap::of_cell(&mesh, c)).collect::<Result<Vec<_>>>()?;

        let darcy_rule = FormRule::new(dim, 2 * k + 4, spaces, &maps)?;
        let transport_rule = FormRule::new(dim, 2 * r + 3, spaces, &maps)?;
        let load_rule = FormRule::new(dim, 2 * r + 4, spaces, &maps)?;

        let mut free_velocity = vec![None; velocity.n_dofs()];
        let mut boundary = vec![false; velocity.n_dofs()];
        for &d in velocity.boundary_dofs() {
            boundary[d] = true;
        }
        let mut n_free_velocity = 0;
        for (d, slot) in free_velocity.iter_mut().enumerate() {
            if !boundary[d] {
                *slot = Some(n_free_velocity);
                n_free_velocity += 1;
            }
        }

        let mut weights = vec![0.0; pressure.n_dofs()];
        let lr = &load_rule;
        for (c, map) in maps.iter().enumerate() {
            for q in 0..lr.n_points() {
                let w = lr.rule.weights[q] * map.det;
                for (i, &d) in pressure.cell_dofs(c).iter().enumerate() {
                    weights[d] += w * lr.pressure.value(q, i);
                }
            }
        }

        Ok(Discretization {
            mesh,
            r,
            concentration,
            velocity,
            pressure,
            maps,
            darcy_rule,
            transport_rule,
            load_rule,
            coefficients,
            tau,
            n_steps,
            final_time,
            solver: SolverConfig::default(),
            free_velocity,
            n_free_velocity,
            constraint: ZeroMeanConstraint::with_unit_mode(weights),
            pool: None,
        })
    }

    /// Discretization of a manufactured case on an `m`-per-side mesh.
    pub fn for_case(case: &ManufacturedCase, m: usize, r: usize, tau: f64) -> Result<Self> {
        let mesh = Mesh::structured(case.dim(), m)?;
        Self::new(mesh, r, case.coefficients(), tau, case.final_time)
    }

    pub fn with_solver(mut self, solver: SolverConfig) -> Result<Self> {
        solver.validate()?;
        self.solver = solver;
        Ok(self)
    }

    /// Runs element assembly on `threads` worker threads; `1` (the
    /// default) assembles on the calling thread. Results are identical for
    /// every thread count.
    pub fn with_threads(mut self, threads: usize) -> Result<Self> {
        if threads == 0 {
            return Err(Error::InvalidArgument("thread count must be at least 1".into()));
        }
        self.pool = if threads == 1 {
            None
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            Some(Arc::new(pool))
        };
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    /// Maps `f` over fixed-size cell ranges and returns the results in
    /// cell order.
    pub(crate) fn map_cells<T: Send>(&self, f: impl Fn(Range<usize>) -> T + Sync + Send) -> Vec<T> {
        let n = self.mesh.n_cells();
        let ranges: Vec<Range<usize>> = (0..n).step_by(CHUNK).map(|s| s..(s + CHUNK).min(n)).collect();
        match &self.pool {
            Some(pool) => pool.install(|| ranges.into_par_iter().map(&f).collect()),
            None => ranges.into_iter().map(f).collect(),
        }
    }

    /// Zero velocity and pressure, `C^0` the nodal interpolant of `c0`.
    pub fn initial_state(&self, c0: impl Fn(&Point) -> f64) -> Result<State> {
        let c = interpolate_nodal(&self.mesh, &self.concentration, |x, _| c0(x), 0.0)?;
        Ok(State {
            n: 0,
            c,
            u: vec![0.0; self.velocity.n_dofs()],
            p: vec![0.0; self.pressure.n_dofs()],
        })
    }

    pub fn time(&self, n: usize) -> f64 {
        if n == self.n_steps {
            self.final_time
        } else {
            n as f64 * self.tau
        }
    }

    /// Expands free velocity unknowns to all dofs (boundary dofs are zero).
    pub fn expand_velocity(&self, free: &[f64]) -> Vec<f64> {
        self.free_velocity
            .iter()
            .map(|slot| slot.map_or(0.0, |i| free[i]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub n: usize,
    pub c: Vec<f64>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepInfo {
    /// `||B U - g|| / ||g||` after the Darcy solve.
    pub divergence_residual: f64,
    /// `max|K - Kᵀ| / max|K|` of the transport matrix.
    pub transport_asymmetry: f64,
}

/// Advances one step.
pub fn step(disc: &Discretization, state: &State) -> Result<State> {
    step_with_info(disc, state).map(|(s, _)| s)
}

pub fn step_with_info(disc: &Discretization, state: &State) -> Result<(State, StepInfo)> {
    let t_next = disc.time(state.n + 1);
    let (u, p, divergence_residual) = solve_darcy(disc, &state.c, t_next)?;
    let (k, b) = assemble_transport(disc, &u, &state.c, t_next)?;
    let transport_asymmetry = k.asymmetry() / k.max_abs().max(f64::MIN_POSITIVE);
    let c = solve_transport(disc, &k, &b, &state.c)?;
    Ok((State { n: state.n + 1, c, u, p }, StepInfo { divergence_residual, transport_asymmetry }))
}

/// Runs all steps from the interpolated initial concentration.
pub fn run(disc: &Discretization, case: &ManufacturedCase) -> Result<State> {
    run_observed(disc, case, |_, _| {})
}

/// As [`run`], calling `observe` after every step.
pub fn run_observed(
    disc: &Discretization,
    case: &ManufacturedCase,
    mut observe: impl FnMut(&State, &StepInfo),
) -> Result<State> {
    let mut state = disc.initial_state(|x| case.concentration(x, 0.0))?;
    for _ in 0..disc.n_steps {
        let (next, info) = step_with_info(disc, &state)?;
        observe(&next, &info);
        state = next;
    }
    Ok(state)
}
