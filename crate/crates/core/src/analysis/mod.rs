//! Error measurement, convergence studies and report/field output.

pub mod report;
pub mod vtu;

use std::time::Instant;

pub use report::{parse_csv, to_csv, to_markdown, write_report, ParsedReport, ReportFormat};
pub use vtu::export_vtu;

use crate::error::{Error, Result};
use crate::fem::{local_coefficients, scalar_at, vector_at, DofMap};
use crate::geometry::{sub, dot, Point};
use crate::linalg::SolverConfig;
use crate::problem::{Example, ManufacturedCase};
use crate::scheme::{run_observed, Discretization, FormRule, State};

/// `||u_h - u||_{L2}` for a scalar field on the load rule.
pub fn l2_error(disc: &Discretization, dofmap: &DofMap, coeffs: &[f64], exact: impl Fn(&Point) -> f64) -> f64 {
    let lr = &disc.load_rule;
    let tab = scalar_tab(lr, disc, dofmap);
    let mut local = Vec::new();
    let mut total = 0.0;
    for (c, map) in disc.maps.iter().enumerate() {
        local_coefficients(dofmap, c, coeffs, &mut local);
        for q in 0..lr.n_points() {
            let (v, _) = scalar_at(tab, q, map, &local);
            let e = v - exact(lr.point(c, q));
            total += lr.rule.weights[q] * map.det * e * e;
        }
    }
    total.sqrt()
}

fn scalar_tab<'a>(lr: &'a FormRule, disc: &Discretization, dofmap: &DofMap) -> &'a crate::fem::Tabulation {
    if dofmap.space() == disc.pressure.space() {
        &lr.pressure
    } else {
        &lr.concentration
    }
}

/// `||U_h - u||_{L2}` with the Euclidean norm of the pointwise difference.
pub fn l2_error_vector(disc: &Discretization, coeffs: &[f64], exact: impl Fn(&Point) -> Point) -> f64 {
    let lr = &disc.load_rule;
    let mut local = Vec::new();
    let mut total = 0.0;
    for (c, map) in disc.maps.iter().enumerate() {
        local_coefficients(&disc.velocity, c, coeffs, &mut local);
        for q in 0..lr.n_points() {
            let (v, _) = vector_at(&lr.velocity, q, map, &local);
            let e = sub(&v, &exact(lr.point(c, q)));
            total += lr.rule.weights[q] * map.det * dot(&e, &e);
        }
    }
    total.sqrt()
}

/// Errors of a state against a manufactured solution at time `t`.
/// The discrete pressure has zero mean, so it is compared with the exact
/// pressure minus its mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Errors {
    pub p: f64,
    pub u: f64,
    pub c: f64,
}

pub fn state_errors(disc: &Discretization, state: &State, case: &ManufacturedCase, t: f64) -> Errors {
    let mean = case.pressure_mean(t);
    Errors {
        p: l2_error(disc, &disc.pressure, &state.p, |x| case.pressure(x, t) - mean),
        u: l2_error_vector(disc, &state.u, |x| case.velocity(x, t)),
        c: l2_error(disc, &disc.concentration, &state.c, |x| case.concentration(x, t)),
    }
}

/// How the time step is tied to the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TauRule {
    /// `8/M^2` for `r = 1`, `16/M^3` for `r = 2`.
    #[default]
    Table,
    /// `8/M^(r+1)`.
    Text,
}

impl TauRule {
    pub fn tau(self, r: usize, m: usize) -> f64 {
        let m = m as f64;
        match (self, r) {
            (TauRule::Table, 2) => 16.0 / m.powi(3),
            _ => 8.0 / m.powi(r as i32 + 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TauRule::Table => "table",
            TauRule::Text => "text",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportRow {
    pub m: usize,
    pub h: f64,
    pub tau: f64,
    pub err_p: f64,
    pub err_u: f64,
    pub err_c: f64,
    /// Wall time of the run; `None` when timing is disabled.
    pub seconds: Option<f64>,
    /// Largest divergence-identity residual over all Darcy solves.
    pub max_divergence_residual: f64,
    /// Largest relative asymmetry of the transport matrix over all steps.
    pub max_transport_asymmetry: f64,
}

impl ReportRow {
    pub fn errors(&self) -> [f64; 3] {
        [self.err_p, self.err_u, self.err_c]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub example: Example,
    pub r: usize,
    pub tau_rule: TauRule,
    pub solver: SolverConfig,
    pub version: &'static str,
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    /// `log2(E(M)/E(2M))` per column for each consecutive-doubling pair;
    /// entry `i` belongs to row `i + 1`.
    pub fn orders(&self) -> Vec<Option<[f64; 3]>> {
        self.rows
            .windows(2)
            .map(|w| {
                if w[0].m.checked_mul(2) != Some(w[1].m) {
                    return None;
                }
                let (a, b) = (w[0].errors(), w[1].errors());
                Some([0, 1, 2].map(|k| (a[k] / b[k]).log2()))
            })
            .collect()
    }

    /// Mean of the available consecutive orders, per column.
    pub fn mean_orders(&self) -> Option<[f64; 3]> {
        let orders: Vec<[f64; 3]> = self.orders().into_iter().flatten().collect();
        if orders.is_empty() {
            return None;
        }
        let n = orders.len() as f64;
        Some([0, 1, 2].map(|k| orders.iter().map(|o| o[k]).sum::<f64>() / n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyOptions {
    pub solver: SolverConfig,
    pub threads: usize,
    /// Record wall time per row; off gives byte-identical reports.
    pub timing: bool,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions { solver: SolverConfig::default(), threads: 1, timing: true }
    }
}

/// Checks that `meshes` is non-empty, positive and strictly doubling.
pub fn validate_meshes(meshes: &[usize]) -> Result<()> {
    if meshes.is_empty() || meshes.contains(&0) {
        return Err(Error::InvalidArgument("mesh list must be non-empty and positive".into()));
    }
    if meshes.windows(2).any(|w| w[0].checked_mul(2) != Some(w[1])) {
        return Err(Error::InvalidArgument(format!("mesh list {meshes:?} is not strictly doubling")));
    }
    Ok(())
}

/// Parses a comma-separated mesh list such as `8,16,32` and validates it
/// with [`validate_meshes`].
pub fn parse_mesh_list(s: &str) -> Result<Vec<usize>> {
    let meshes = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad mesh size {t:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    validate_meshes(&meshes)?;
    Ok(meshes)
}

/// Runs the scheme on each mesh and measures the errors at the final time.
pub fn convergence_study(
    example: Example,
    r: usize,
    meshes: &[usize],
    tau_rule: TauRule,
    options: &StudyOptions,
) -> Result<ConvergenceReport> {
    study_with(example, r, meshes, tau_rule, options, |_, _, _| {})
}

/// As [`convergence_study`], handing each finished run to `inspect`.
pub fn study_with(
    example: Example,
    r: usize,
    meshes: &[usize],
    tau_rule: TauRule,
    options: &StudyOptions,
    mut inspect: impl FnMut(&Discretization, &State, &ReportRow),
) -> Result<ConvergenceReport> {
    validate_meshes(meshes)?;
    let case = ManufacturedCase::new(example);
    let mut rows = Vec::with_capacity(meshes.len());
    for &m in meshes {
        let tau = tau_rule.tau(r, m);
        let disc = Discretization::for_case(&case, m, r, tau)?
            .with_solver(options.solver)?
            .with_threads(options.threads)?;
        let start = Instant::now();
        let mut max_div = 0.0f64;
        let mut max_asym = 0.0f64;
        let state = run_observed(&disc, &case, |_, info| {
            max_div = max_div.max(info.divergence_residual);
            max_asym = max_asym.max(info.transport_asymmetry);
        })?;
        let elapsed = start.elapsed().as_secs_f64();
        let e = state_errors(&disc, &state, &case, case.final_time);
        let row = ReportRow {
            m,
            h: disc.mesh.mesh_size(),
            tau,
            err_p: e.p,
            err_u: e.u,
            err_c: e.c,
            seconds: options.timing.then_some(elapsed),
            max_divergence_residual: max_div,
            max_transport_asymmetry: max_asym,
        };
        inspect(&disc, &state, &row);
        rows.push(row);
    }
    Ok(ConvergenceReport {
        example,
        r,
        tau_rule,
        solver: options.solver,
        version: env!("CARGO_PKG_VERSION"),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::interpolate_nodal;
    use crate::mesh::Mesh;
    use crate::problem::Coefficients;

    fn disc(m: usize, r: usize) -> Discretization {
        Discretization::new(Mesh::structured(2, m).unwrap(), r, Coefficients::unit(), 0.5, 1.0).unwrap()
    }

    #[test]
    fn interpolated_linear_has_no_error() {
        let d = disc(4, 1);
        let f = |x: &Point| 0.5 + x[0] - 2.0 * x[1];
        let c = interpolate_nodal(&d.mesh, &d.concentration, |x, _| f(x), 0.0).unwrap();
        assert!(l2_error(&d, &d.concentration, &c, f) <= 1e-12);
    }

    #[test]
    fn zero_field_against_constant() {
        let d = disc(3, 2);
        let c = vec![0.0; d.concentration.n_dofs()];
        assert!((l2_error(&d, &d.concentration, &c, |_| 0.2) - 0.2).abs() <= 1e-14);
        let u = vec![0.0; d.velocity.n_dofs()];
        assert!((l2_error_vector(&d, &u, |_| [0.3, 0.4, 0.0]) - 0.5).abs() <= 1e-14);
    }

    #[test]
    fn tau_rules() {
        assert_eq!(TauRule::Table.tau(1, 8), 0.125);
        assert_eq!(TauRule::Table.tau(2, 8), 16.0 / 512.0);
        assert_eq!(TauRule::Text.tau(2, 8), 8.0 / 512.0);
        assert_eq!(TauRule::Text.tau(1, 16), TauRule::Table.tau(1, 16));
    }

    #[test]
    fn mesh_lists_must_double() {
        assert!(validate_meshes(&[8, 16, 32]).is_ok());
        assert!(validate_meshes(&[8, 12]).is_err());
        assert!(validate_meshes(&[]).is_err());
        assert!(validate_meshes(&[0]).is_err());
        assert!(validate_meshes(&[16, 8]).is_err());
        assert!(validate_meshes(&[usize::MAX, 1]).is_err());
    }

    #[test]
    fn mesh_list_parsing() {
        assert_eq!(parse_mesh_list("8,16,32").unwrap(), vec![8, 16, 32]);
        assert_eq!(parse_mesh_list(" 4, 8").unwrap(), vec![4, 8]);
        assert!(parse_mesh_list("").is_err());
        assert!(parse_mesh_list("8,,16").is_err());
        assert!(parse_mesh_list("8,-16").is_err());
        assert!(parse_mesh_list("99999999999999999999999").is_err());
        assert!(parse_mesh_list("8,15").is_err());
    }

    #[test]
    fn orders_from_rows() {
        let row = |m: usize, e: f64| ReportRow {
            m,
            h: 1.0 / m as f64,
            tau: 0.1,
            err_p: e,
            err_u: 2.0 * e,
            err_c: e * e,
            seconds: None,
            max_divergence_residual: 0.0,
            max_transport_asymmetry: 0.0,
        };
        let report = ConvergenceReport {
            example: Example::Ex51,
            r: 1,
            tau_rule: TauRule::Table,
            solver: SolverConfig::default(),
            version: "0",
            rows: vec![row(8, 0.1), row(16, 0.05), row(32, 0.025)],
        };
        let mean = report.mean_orders().unwrap();
        assert!((mean[0] - 1.0).abs() < 1e-12);
        assert!((mean[2] - 2.0).abs() < 1e-12);
        assert_eq!(report.orders().len(), 2);
    }
}
