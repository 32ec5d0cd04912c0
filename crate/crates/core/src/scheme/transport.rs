//! Concentration step.

use crate::error::Result;
use crate::fem::{local_coefficients, scalar_at, vector_at};
use crate::geometry::{dot, Point};
use crate::linalg::{spd_solve_from, SparseMatrix};
use crate::problem::coefficients::dispersion;
use crate::scheme::Discretization;

/// Assembles `K = (Φ/τ) M + S(D(U)) + M(q^P)` and
/// `b = (Φ/τ) M C^n - (U · ∇C^n, φ) + (ĉ q^I, φ)`.
///
/// `u_next` holds velocity coefficients on all dofs, `c_prev` the
/// concentration at the previous level.
pub fn assemble_transport(
    disc: &Discretization,
    u_next: &[f64],
    c_prev: &[f64],
    t_next: f64,
) -> Result<(SparseMatrix, Vec<f64>)> {
    let tr = &disc.transport_rule;
    let lr = &disc.load_rule;
    let coeffs = &disc.coefficients;
    let dim = disc.dim();
    let n = disc.concentration.n_dofs();
    let tau = disc.tau;

    let chunks: Vec<(Vec<(usize, usize, f64)>, Vec<(usize, f64)>)> = disc.map_cells(|cells| {
        let nl = disc.concentration.local_dim();
        let mut trip = Vec::new();
        let mut rhs = Vec::new();
        let mut kk = vec![0.0; nl * nl];
        let mut bk = vec![0.0; nl];
        let mut grads = vec![[0.0; 3]; nl];
        let mut c_local = Vec::new();
        let mut u_local = Vec::new();
        for c in cells {
            let map = &disc.maps[c];
            local_coefficients(&disc.concentration, c, c_prev, &mut c_local);
            local_coefficients(&disc.velocity, c, u_next, &mut u_local);
            kk.iter_mut().for_each(|v| *v = 0.0);
            bk.iter_mut().for_each(|v| *v = 0.0);
            for q in 0..tr.n_points() {
                let x = tr.point(c, q);
                let w = tr.rule.weights[q] * map.det;
                let (u, _) = vector_at(&tr.velocity, q, map, &u_local);
                let (cq, grad_c) = scalar_at(&tr.concentration, q, map, &c_local);
                let phi = (coeffs.porosity)(x);
                let qp = (coeffs.production)(x, t_next);
                let speed = dot(&u, &u).sqrt();
                let d = dispersion(phi, (coeffs.d_mt)(speed), (coeffs.d_lt)(speed), &u, dim);
                let convection = dot(&u, &grad_c);
                for (i, g) in grads.iter_mut().enumerate() {
                    *g = map.push_gradient(tr.concentration.grad(q, i));
                }
                for j in 0..nl {
                    let phj = tr.concentration.value(q, j);
                    let dg = mat_vec(&d, &grads[j], dim);
                    for i in 0..nl {
                        let phi_i = tr.concentration.value(q, i);
                        kk[i * nl + j] += w * ((phi / tau + qp) * phi_i * phj + dot(&dg, &grads[i]));
                    }
                }
                for (i, b) in bk.iter_mut().enumerate() {
                    *b += w * (phi / tau * cq - convection) * tr.concentration.value(q, i);
                }
            }
            for q in 0..lr.n_points() {
                let w = lr.rule.weights[q] * map.det;
                let s = (coeffs.transport_source)(lr.point(c, q), t_next);
                for (i, b) in bk.iter_mut().enumerate() {
                    *b += w * s * lr.concentration.value(q, i);
                }
            }
            let dofs = disc.concentration.cell_dofs(c);
            for i in 0..nl {
                for j in 0..nl {
                    trip.push((dofs[i], dofs[j], kk[i * nl + j]));
                }
                rhs.push((dofs[i], bk[i]));
            }
        }
        (trip, rhs)
    });

    let mut triplets = Vec::new();
    let mut b = vec![0.0; n];
    for (t, r) in chunks {
        triplets.extend(t);
        for (d, v) in r {
            b[d] += v;
        }
    }
    Ok((SparseMatrix::from_triplets(n, n, &triplets)?, b))
}

#[inline]
fn mat_vec(d: &[[f64; 3]; 3], v: &Point, dim: usize) -> Point {
    let mut out = [0.0; 3];
    for i in 0..dim {
        for j in 0..dim {
            out[i] += d[i][j] * v[j];
        }
    }
    out
}

/// Solves the SPD transport system, warm-started from `C^n`.
pub fn solve_transport(disc: &Discretization, k: &SparseMatrix, b: &[f64], c_prev: &[f64]) -> Result<Vec<f64>> {
    spd_solve_from(k, b, c_prev, &disc.solver)
}
