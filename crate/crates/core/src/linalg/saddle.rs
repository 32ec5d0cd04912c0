//! Saddle-point solve for `[[A, B^T], [B, 0]]` with a zero-mean pressure
//! constraint enforced through one bordering Lagrange multiplier.

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};
use crate::linalg::dense::DenseMatrix;
use crate::linalg::sparse::SparseMatrix;
use crate::linalg::{krylov, norm2, Preconditioner, SaddleMethod, SolverConfig, DENSE_LIMIT};

/// The pressure nullspace and the mean functional used to remove it.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMeanConstraint {
    /// `weights[j] = ∫ φ_j`, so `weights · p` is the integral of the pressure.
    pub weights: Vec<f64>,
    /// Coefficients of the constant function in the pressure basis; this is
    /// the kernel of `B^T`.
    pub constant_mode: Vec<f64>,
}

impl ZeroMeanConstraint {
    /// Mean functional with the constant function represented by all-ones
    /// coefficients.
    pub fn with_unit_mode(weights: Vec<f64>) -> Self {
        let n = weights.len();
        ZeroMeanConstraint { weights, constant_mode: vec![1.0; n] }
    }

    /// Component of a pressure load along the constant mode.
    pub fn load_residual(&self, g: &[f64]) -> f64 {
        let c = &self.constant_mode;
        let cg: f64 = c.iter().zip(g).map(|(a, b)| a * b).sum();
        cg.abs() / norm2(c).max(f64::MIN_POSITIVE)
    }

    /// Integral of a pressure field.
    pub fn mean(&self, p: &[f64]) -> f64 {
        self.weights.iter().zip(p).map(|(a, b)| a * b).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSolution {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    /// Value of the bordering multiplier; zero up to round-off for
    /// compatible loads.
    pub multiplier: f64,
}

/// Assembles the bordered matrix `[[A, B^T, 0], [B, 0, m], [0, m^T, 0]]`.
pub fn bordered_matrix(a: &SparseMatrix, b: &SparseMatrix, constraint: &ZeroMeanConstraint) -> SparseMatrix {
    let (nu, np) = (a.nrows(), b.nrows());
    let n = nu + np + 1;
    let mut triplets = Vec::with_capacity(a.nnz() + 2 * b.nnz() + 2 * np);
    triplets.extend(a.triplets());
    for (r, c, v) in b.triplets() {
        triplets.push((nu + r, c, v));
        triplets.push((c, nu + r, v));
    }
    for (j, &w) in constraint.weights.iter().enumerate() {
        if w != 0.0 {
            triplets.push((nu + j, n - 1, w));
            triplets.push((n - 1, nu + j, w));
        }
    }
    SparseMatrix::from_triplets(n, n, &triplets).expect("block indices in range")
}

/// Solves `A u + B^T p = f`, `B u = g`, `m · p = 0`.
///
/// `A` must be symmetric positive definite and `g` compatible, i.e. its
/// component along the constant pressure mode must vanish within
/// `rel_tol ||(f, g)|| + abs_tol`.
pub fn saddle_solve(
    a: &SparseMatrix,
    b: &SparseMatrix,
    f: &[f64],
    g: &[f64],
    constraint: &ZeroMeanConstraint,
    cfg: &SolverConfig,
) -> Result<SaddleSolution> {
    cfg.validate()?;
    let (nu, np) = (a.nrows(), b.nrows());
    if a.ncols() != nu || b.ncols() != nu || f.len() != nu || g.len() != np || constraint.weights.len() != np {
        return Err(Error::InvalidArgument("saddle-point block shapes do not match".into()));
    }
    let rhs_norm = (norm2(f).powi(2) + norm2(g).powi(2)).sqrt();
    let tolerance = cfg.rel_tol * rhs_norm + cfg.abs_tol;
    let residual = constraint.load_residual(g);
    if residual > tolerance {
        return Err(Error::IncompatibleLoad { residual, tolerance });
    }
    if rhs_norm == 0.0 {
        return Ok(SaddleSolution { u: vec![0.0; nu], p: vec![0.0; np], multiplier: 0.0 });
    }

    let k = bordered_matrix(a, b, constraint);
    let mut rhs = Vec::with_capacity(nu + np + 1);
    rhs.extend_from_slice(f);
    rhs.extend_from_slice(g);
    rhs.push(0.0);

    let x = match cfg.saddle_method {
        SaddleMethod::SparseLu => pinned_lu_solve(a, b, f, g, constraint)?,
        SaddleMethod::DenseLu => {
            if k.nrows() > DENSE_LIMIT {
                return Err(Error::Unsupported(format!(
                    "dense LU limited to {DENSE_LIMIT} unknowns, system has {}",
                    k.nrows()
                )));
            }
            k.to_dense().solve(&rhs)?
        }
        SaddleMethod::Minres => {
            let minv = block_preconditioner(a, b, constraint, cfg.preconditioner)?;
            krylov::minres_with(&k, &rhs, &minv, cfg)?
        }
    };

    let r: Vec<f64> = k.mul_vec(&x).iter().zip(&rhs).map(|(kx, bi)| kx - bi).collect();
    let res = norm2(&r);
    if res > tolerance {
        return Err(Error::NotConverged { solver: "saddle-point solve", iterations: 1, residual: res });
    }
    Ok(SaddleSolution { u: x[..nu].to_vec(), p: x[nu..nu + np].to_vec(), multiplier: x[nu + np] })
}

/// Inverse of the block diagonal `diag(A)`, `diag(B diag(A)^{-1} B^T)` and
/// the matching scalar for the multiplier row.
fn block_preconditioner(
    a: &SparseMatrix,
    b: &SparseMatrix,
    constraint: &ZeroMeanConstraint,
    kind: Preconditioner,
) -> Result<Vec<f64>> {
    let (nu, np) = (a.nrows(), b.nrows());
    if kind == Preconditioner::None {
        return Ok(vec![1.0; nu + np + 1]);
    }
    let da = a.diagonal();
    if da.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::Singular("saddle preconditioner (non-positive velocity diagonal)"));
    }
    let mut minv: Vec<f64> = da.iter().map(|d| 1.0 / d).collect();
    let mut schur = vec![0.0; np];
    for (r, s) in schur.iter_mut().enumerate() {
        *s = b.row(r).map(|(c, v)| v * v / da[c]).sum();
    }
    let mut mult = 0.0;
    for (s, w) in schur.iter().zip(&constraint.weights) {
        if !(*s > 0.0) {
            return Err(Error::Singular("saddle preconditioner (empty divergence row)"));
        }
        mult += w * w / s;
    }
    minv.extend(schur.iter().map(|s| 1.0 / s));
    minv.push(1.0 / mult.max(f64::MIN_POSITIVE));
    Ok(minv)
}

/// Sparse LU with one pressure unknown pinned to zero, followed by removal
/// of the mean.
///
/// For a compatible load the pinned system has the same velocity and the
/// same pressure up to a multiple of the constant mode, so this equals the
/// bordered solution. Bordering directly couples every pressure unknown
/// through one dense row, which makes sparse LU orders of magnitude slower.
fn pinned_lu_solve(
    a: &SparseMatrix,
    b: &SparseMatrix,
    f: &[f64],
    g: &[f64],
    constraint: &ZeroMeanConstraint,
) -> Result<Vec<f64>> {
    let (nu, np) = (a.nrows(), b.nrows());
    let mode = &constraint.constant_mode;
    let pin = (0..np)
        .max_by(|&i, &j| mode[i].abs().total_cmp(&mode[j].abs()))
        .ok_or(Error::InvalidArgument("empty pressure space".into()))?;
    let shift = |r: usize| if r < pin { r } else { r - 1 };
    let n = nu + np - 1;
    let mut triplets = a.triplets();
    for (r, c, v) in b.triplets() {
        if r != pin {
            triplets.push((nu + shift(r), c, v));
            triplets.push((c, nu + shift(r), v));
        }
    }
    let k = SparseMatrix::from_triplets(n, n, &triplets)?;
    let mut rhs = f.to_vec();
    rhs.extend(g.iter().enumerate().filter(|(r, _)| *r != pin).map(|(_, v)| *v));
    let y = sparse_lu_solve(&k, &rhs)?;

    let mut x = Vec::with_capacity(nu + np + 1);
    x.extend_from_slice(&y[..nu]);
    let mut p = vec![0.0; np];
    for r in 0..np {
        if r != pin {
            p[r] = y[nu + shift(r)];
        }
    }
    let mass: f64 = constraint.weights.iter().zip(mode).map(|(w, c)| w * c).sum();
    let alpha = constraint.mean(&p) / mass;
    x.extend(p.iter().zip(mode).map(|(v, c)| v - alpha * c));
    x.push(0.0);
    Ok(x)
}

/// Direct sparse LU solve (faer), sequential.
pub fn sparse_lu_solve(k: &SparseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = k.nrows();
    let triplets: Vec<Triplet<usize, usize, f64>> =
        k.triplets().into_iter().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::InvalidArgument(format!("sparse matrix construction failed: {e:?}")))?;
    let lu = mat.sp_lu().map_err(|_| Error::Singular("sparse LU"))?;
    let b = faer::Col::<f64>::from_fn(n, |i| rhs[i]);
    let x = lu.solve(&b);
    let out: Vec<f64> = (0..n).map(|i| x[i]).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("sparse LU"));
    }
    Ok(out)
}

/// Dense reference solution of the bordered system, for systems small
/// enough to factor densely.
pub fn dense_saddle_solve(
    a: &SparseMatrix,
    b: &SparseMatrix,
    f: &[f64],
    g: &[f64],
    constraint: &ZeroMeanConstraint,
) -> Result<SaddleSolution> {
    let (nu, np) = (a.nrows(), b.nrows());
    let k: DenseMatrix = bordered_matrix(a, b, constraint).to_dense();
    let mut rhs = f.to_vec();
    rhs.extend_from_slice(g);
    rhs.push(0.0);
    let x = k.solve(&rhs)?;
    Ok(SaddleSolution { u: x[..nu].to_vec(), p: x[nu..nu + np].to_vec(), multiplier: x[nu + np] })
}
