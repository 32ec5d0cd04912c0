//! Conjugate gradients for SPD systems and MINRES for symmetric indefinite
//! systems, both with optional Jacobi preconditioning.

use crate::error::{Error, Result};
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::{norm2, Preconditioner, SolverConfig};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Inverse diagonal, or ones when no preconditioning is requested.
fn jacobi(a: &SparseMatrix, kind: Preconditioner) -> Result<Vec<f64>> {
    match kind {
        Preconditioner::None => Ok(vec![1.0; a.nrows()]),
        Preconditioner::Diagonal => a
            .diagonal()
            .iter()
            .map(|&d| {
                if d.abs() > 0.0 {
                    Ok(1.0 / d.abs())
                } else {
                    Err(Error::Singular("Jacobi preconditioner (zero diagonal)"))
                }
            })
            .collect(),
    }
}

/// Preconditioned conjugate gradients.
///
/// Stops when `||b - A x|| <= rtol ||b|| + atol`.
pub fn conjugate_gradient(a: &SparseMatrix, b: &[f64], x0: Option<&[f64]>, cfg: &SolverConfig) -> Result<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.nrows(), n);
    let minv = jacobi(a, cfg.preconditioner)?;
    let target = cfg.rel_tol * norm2(b) + cfg.abs_tol;
    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut r: Vec<f64> = a.mul_vec(&x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
    let mut res = norm2(&r);
    if res <= target {
        return Ok(x);
    }
    let mut z: Vec<f64> = r.iter().zip(&minv).map(|(ri, mi)| ri * mi).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let max_iter = cfg.max_iterations(n);
    for _ in 0..max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(Error::Singular("conjugate gradient (matrix not positive definite)"));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = norm2(&r);
        if res <= target {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] * minv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::NotConverged { solver: "conjugate gradient", iterations: max_iter, residual: res })
}

/// Preconditioned MINRES (Paige-Saunders) for symmetric, possibly
/// indefinite `A`. `minv` is the inverse of a symmetric positive definite
/// diagonal preconditioner.
///
/// The Lanczos recurrence only tracks the preconditioned residual norm, so
/// the true residual is checked before returning.
pub fn minres_with(a: &SparseMatrix, b: &[f64], minv: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>> {
    let n = b.len();
    let target = cfg.rel_tol * norm2(b) + cfg.abs_tol;
    let mut x = vec![0.0; n];
    if norm2(b) <= cfg.abs_tol {
        return Ok(x);
    }
    let max_iter = cfg.max_iterations(n);

    // restarts guard against the preconditioned/true residual mismatch
    let mut iterations = 0;
    let mut res = f64::INFINITY;
    while iterations < max_iter {
        let r0: Vec<f64> = a.mul_vec(&x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
        res = norm2(&r0);
        if res <= target {
            return Ok(x);
        }
        let mut r1 = r0.clone();
        let mut y: Vec<f64> = r0.iter().zip(minv).map(|(r, m)| r * m).collect();
        let mut beta1 = dot(&r0, &y);
        if beta1 <= 0.0 {
            return Err(Error::Singular("MINRES (indefinite preconditioner)"));
        }
        beta1 = beta1.sqrt();
        let mut r2 = r1.clone();
        let (mut oldb, mut beta, mut dbar, mut epsln) = (0.0, beta1, 0.0, 0.0);
        let (mut phibar, mut cs, mut sn) = (beta1, -1.0, 0.0);
        let mut w = vec![0.0; n];
        let mut w2 = vec![0.0; n];
        let mut v = vec![0.0; n];
        let mut av = vec![0.0; n];
        // scale between the preconditioned and true residual at restart
        let ratio = res / beta1;
        let mut k = 0;
        while iterations < max_iter {
            iterations += 1;
            k += 1;
            let s = 1.0 / beta;
            for i in 0..n {
                v[i] = s * y[i];
            }
            a.mul_vec_into(&v, &mut av);
            let mut yv = av.clone();
            if k >= 2 {
                for i in 0..n {
                    yv[i] -= (beta / oldb) * r1[i];
                }
            }
            let alfa = dot(&v, &yv);
            for i in 0..n {
                yv[i] -= (alfa / beta) * r2[i];
            }
            r1 = std::mem::replace(&mut r2, yv);
            y = r2.iter().zip(minv).map(|(r, m)| r * m).collect();
            oldb = beta;
            let b2 = dot(&r2, &y);
            if b2 < 0.0 {
                return Err(Error::Singular("MINRES (indefinite preconditioner)"));
            }
            beta = b2.sqrt();

            let oldeps = epsln;
            let delta = cs * dbar + sn * alfa;
            let gbar = sn * dbar - cs * alfa;
            epsln = sn * beta;
            dbar = -cs * beta;
            let gamma = (gbar * gbar + beta * beta).sqrt().max(f64::EPSILON);
            cs = gbar / gamma;
            sn = beta / gamma;
            let phi = cs * phibar;
            phibar *= sn;

            let denom = 1.0 / gamma;
            let w1 = std::mem::replace(&mut w2, w.clone());
            for i in 0..n {
                w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * denom;
                x[i] += phi * w[i];
            }
            if phibar * ratio <= 0.1 * target || beta == 0.0 {
                break;
            }
        }
        let r: Vec<f64> = a.mul_vec(&x).iter().zip(b).map(|(ax, bi)| bi - ax).collect();
        res = norm2(&r);
        if res <= target {
            return Ok(x);
        }
    }
    Err(Error::NotConverged { solver: "MINRES", iterations, residual: res })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cg_identity() {
        let a = SparseMatrix::identity(4);
        let b = [1.0, -2.0, 3.0, 0.5];
        let x = conjugate_gradient(&a, &b, None, &SolverConfig::default()).unwrap();
        for (xi, bi) in x.iter().zip(b) {
            assert_abs_diff_eq!(*xi, bi, epsilon = 1e-14);
        }
    }

    #[test]
    fn cg_two_by_two() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)]).unwrap();
        let x = conjugate_gradient(&a, &[1.0, 1.0], None, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(x[0], 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn cg_reports_exhausted_budget() {
        let a = SparseMatrix::from_triplets(3, 3, &[(0, 0, 1.0), (1, 1, 10.0), (2, 2, 100.0), (0, 2, 0.5), (2, 0, 0.5)])
            .unwrap();
        let cfg = SolverConfig { max_iterations: Some(1), preconditioner: Preconditioner::None, ..Default::default() };
        match conjugate_gradient(&a, &[1.0, 1.0, 1.0], None, &cfg) {
            Err(Error::NotConverged { residual, .. }) => assert!(residual > 0.0),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn minres_indefinite_diagonal() {
        let a = SparseMatrix::from_triplets(3, 3, &[(0, 0, 2.0), (1, 1, -3.0), (2, 2, 0.5), (0, 1, 1.0), (1, 0, 1.0)])
            .unwrap();
        let b = [1.0, 2.0, 3.0];
        let x = minres_with(&a, &b, &[1.0; 3], &SolverConfig::default()).unwrap();
        let r = a.mul_vec(&x);
        for (ri, bi) in r.iter().zip(b) {
            assert_abs_diff_eq!(*ri, bi, epsilon = 1e-9);
        }
    }
}
