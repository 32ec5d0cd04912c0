//! Mixed Darcy step.

use crate::error::Result;
use crate::fem::{local_coefficients, scalar_at};
use crate::geometry::dot;
use crate::linalg::{norm2, saddle_solve, SparseMatrix};
use crate::scheme::Discretization;

/// Darcy system on the free velocity unknowns:
/// `A u + B^T p = f`, `B u = g`.
///
/// Here `p` is minus the pressure: integrating `u = -k ∇p / μ` by parts
/// against `v` with `v · n = 0` gives `(μ/k u, v) = (p, div v)`.
#[derive(Debug, Clone)]
pub struct DarcySystem {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub f: Vec<f64>,
    /// Pressure load, projected onto the loads compatible with `u · n = 0`.
    pub g: Vec<f64>,
    /// `(q^I - q^P, φ_j)` as integrated, before projection.
    pub g_raw: Vec<f64>,
}

/// Assembles the Darcy system with `μ` evaluated at `C^n` (`c_prev`) and
/// the source at `t_next`.
///
/// The source integrates to zero exactly, but its quadrature does not; the
/// constant-mode component of the integrated load is removed so the
/// system stays solvable. `g_raw` keeps the unprojected load.
pub fn assemble_darcy(disc: &Discretization, c_prev: &[f64], t_next: f64) -> Result<DarcySystem> {
    let dr = &disc.darcy_rule;
    let lr = &disc.load_rule;
    let coeffs = &disc.coefficients;
    let (nu, np) = (disc.n_free_velocity, disc.pressure.n_dofs());
    let nq = dr.n_points();

    type Chunk = (Vec<(usize, usize, f64)>, Vec<(usize, usize, f64)>, Vec<(usize, f64)>);
    let chunks: Vec<Chunk> = disc.map_cells(|cells| {
        let mut a_trip = Vec::new();
        let mut b_trip = Vec::new();
        let mut g_loc = Vec::new();
        let mut c_local = Vec::new();
        let nv = disc.velocity.local_dim();
        let npl = disc.pressure.local_dim();
        let mut ak = vec![0.0; nv * nv];
        let mut bk = vec![0.0; npl * nv];
        let mut phys = vec![[0.0; 3]; nv];
        for c in cells {
            let map = &disc.maps[c];
            local_coefficients(&disc.concentration, c, c_prev, &mut c_local);
            ak.iter_mut().for_each(|v| *v = 0.0);
            bk.iter_mut().for_each(|v| *v = 0.0);
            for q in 0..nq {
                let x = dr.point(c, q);
                let (cq, _) = scalar_at(&dr.concentration, q, map, &c_local);
                let weight = (coeffs.viscosity)(cq) / (coeffs.permeability)(x);
                let w = dr.rule.weights[q] * map.det;
                for (i, v) in phys.iter_mut().enumerate() {
                    *v = crate::fem::piola_map(map, dr.velocity.vector(q, i));
                }
                for i in 0..nv {
                    for j in 0..nv {
                        ak[i * nv + j] += w * weight * dot(&phys[i], &phys[j]);
                    }
                }
                // div is (div_ref / det); the det cancels with the weight
                let wr = dr.rule.weights[q];
                for a in 0..npl {
                    let psi = dr.pressure.value(q, a);
                    for i in 0..nv {
                        bk[a * nv + i] += wr * dr.velocity.div(q, i) * psi;
                    }
                }
            }
            let vdofs = disc.velocity.cell_dofs(c);
            let vsigns = disc.velocity.cell_signs(c);
            let pdofs = disc.pressure.cell_dofs(c);
            for i in 0..nv {
                let Some(gi) = disc.free_velocity[vdofs[i]] else { continue };
                for j in 0..nv {
                    if let Some(gj) = disc.free_velocity[vdofs[j]] {
                        a_trip.push((gi, gj, vsigns[i] * vsigns[j] * ak[i * nv + j]));
                    }
                }
                for a in 0..npl {
                    b_trip.push((pdofs[a], gi, vsigns[i] * bk[a * nv + i]));
                }
            }
            for a in 0..npl {
                let mut s = 0.0;
                for q in 0..lr.n_points() {
                    let f = (coeffs.darcy_source)(lr.point(c, q), t_next);
                    s += lr.rule.weights[q] * map.det * f * lr.pressure.value(q, a);
                }
                g_loc.push((pdofs[a], s));
            }
        }
        (a_trip, b_trip, g_loc)
    });

    let mut a_trip = Vec::new();
    let mut b_trip = Vec::new();
    let mut g_raw = vec![0.0; np];
    for (a, b, g) in chunks {
        a_trip.extend(a);
        b_trip.extend(b);
        for (d, v) in g {
            g_raw[d] += v;
        }
    }
    let a = SparseMatrix::from_triplets(nu, nu, &a_trip)?;
    let b = SparseMatrix::from_triplets(np, nu, &b_trip)?;

    // The constant pressure is represented by all-ones coefficients, so the
    // compatible loads are those orthogonal to it; remove that component
    // along the mean weights.
    let m = &disc.constraint.weights;
    let defect: f64 = g_raw.iter().sum::<f64>() / m.iter().sum::<f64>();
    let g = g_raw.iter().zip(m).map(|(gi, mi)| gi - defect * mi).collect();
    Ok(DarcySystem { a, b, f: vec![0.0; nu], g, g_raw })
}

/// `||B u - g|| / ||g||` (absolute when `g = 0`).
pub fn divergence_residual(sys: &DarcySystem, u_free: &[f64]) -> f64 {
    let bu = sys.b.mul_vec(u_free);
    let r: Vec<f64> = bu.iter().zip(&sys.g).map(|(a, b)| a - b).collect();
    let scale = norm2(&sys.g);
    if scale > 0.0 {
        norm2(&r) / scale
    } else {
        norm2(&r)
    }
}

/// Solves the Darcy step; returns the velocity on all dofs, the zero-mean
/// pressure and the divergence residual.
///
/// The discrete equations are `(μ(C^n)/k U, v) = (P, div v)` and
/// `(div U, φ) = (q^I - q^P, φ)`, so `P` approximates `p`.
pub fn solve_darcy(disc: &Discretization, c_prev: &[f64], t_next: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let sys = assemble_darcy(disc, c_prev, t_next)?;
    let sol = saddle_solve(&sys.a, &sys.b, &sys.f, &sys.g, &disc.constraint, &disc.solver)?;
    let residual = divergence_residual(&sys, &sol.u);
    let p = sol.p.iter().map(|v| -v).collect();
    Ok((disc.expand_velocity(&sol.u), p, residual))
}
