//! Reference elements, quadrature, the Piola map and global dof maps.

pub mod dofmap;
pub mod lagrange;
pub mod quadrature;
pub mod raviart_thomas;

pub use dofmap::{DofMap, FeSpace};
pub use lagrange::lagrange_eval;
pub use quadrature::{quadrature_rule, QuadRule};
pub use raviart_thomas::{piola_map, rt_eval};

use crate::error::{Error, Result};
use crate::geometry::{dot, CellMap, Point};
use crate::mesh::Mesh;

/// Basis values tabulated at a fixed set of reference points.
///
/// Scalar spaces fill `values` and `grads` (reference gradients); vector
/// spaces fill `vectors` and `divs` (reference divergences). Entries are
/// stored point-major: `[q * n_basis + i]`.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub n_points: usize,
    pub n_basis: usize,
    pub values: Vec<f64>,
    pub grads: Vec<Point>,
    pub vectors: Vec<Point>,
    pub divs: Vec<f64>,
}

impl Tabulation {
    pub fn new(space: FeSpace, dim: usize, points: &[Point]) -> Self {
        let n_basis = space.local_dim(dim);
        let mut tab = Tabulation {
            n_points: points.len(),
            n_basis,
            values: Vec::new(),
            grads: Vec::new(),
            vectors: Vec::new(),
            divs: Vec::new(),
        };
        for p in points {
            match space {
                FeSpace::Lagrange(k) | FeSpace::DiscontinuousLagrange(k) => {
                    let (v, g) = lagrange_eval(dim, k, p);
                    tab.values.extend(v);
                    tab.grads.extend(g);
                }
                FeSpace::RaviartThomas(k) => {
                    let (v, d) = rt_eval(k, dim, p);
                    tab.vectors.extend(v);
                    tab.divs.extend(d);
                }
            }
        }
        tab
    }

    #[inline]
    pub fn value(&self, q: usize, i: usize) -> f64 {
        self.values[q * self.n_basis + i]
    }

    #[inline]
    pub fn grad(&self, q: usize, i: usize) -> &Point {
        &self.grads[q * self.n_basis + i]
    }

    #[inline]
    pub fn vector(&self, q: usize, i: usize) -> &Point {
        &self.vectors[q * self.n_basis + i]
    }

    #[inline]
    pub fn div(&self, q: usize, i: usize) -> f64 {
        self.divs[q * self.n_basis + i]
    }
}

/// Gathers the signed local coefficients of a global vector on cell `c`.
pub fn local_coefficients(dofmap: &DofMap, c: usize, global: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.extend(
        dofmap
            .cell_dofs(c)
            .iter()
            .zip(dofmap.cell_signs(c))
            .map(|(d, s)| s * global[*d]),
    );
}

/// Value and physical gradient of a scalar field at tabulated point `q`.
pub fn scalar_at(tab: &Tabulation, q: usize, map: &CellMap, local: &[f64]) -> (f64, Point) {
    let mut value = 0.0;
    let mut g = [0.0; 3];
    for (i, c) in local.iter().enumerate() {
        value += c * tab.value(q, i);
        let gi = tab.grad(q, i);
        for k in 0..3 {
            g[k] += c * gi[k];
        }
    }
    (value, map.push_gradient(&g))
}

/// Piola-mapped value and divergence of a vector field at tabulated point `q`.
pub fn vector_at(tab: &Tabulation, q: usize, map: &CellMap, local: &[f64]) -> (Point, f64) {
    let mut v = [0.0; 3];
    let mut div = 0.0;
    for (i, c) in local.iter().enumerate() {
        let vi = tab.vector(q, i);
        for k in 0..3 {
            v[k] += c * vi[k];
        }
        div += c * tab.div(q, i);
    }
    (piola_map(map, &v), raviart_thomas::piola_divergence(map, div))
}

/// Nodal interpolation of `f(x, t)` into a Lagrange space.
pub fn interpolate_nodal(
    mesh: &Mesh,
    dofmap: &DofMap,
    f: impl Fn(&Point, f64) -> f64,
    t: f64,
) -> Result<Vec<f64>> {
    let degree = match dofmap.space() {
        FeSpace::Lagrange(k) | FeSpace::DiscontinuousLagrange(k) => k,
        FeSpace::RaviartThomas(_) => {
            return Err(Error::InvalidArgument(
                "nodal interpolation needs a Lagrange space".into(),
            ))
        }
    };
    let nodes = lagrange::lagrange_nodes(mesh.dim(), degree);
    let mut coeffs = vec![0.0; dofmap.n_dofs()];
    for c in 0..mesh.n_cells() {
        let map = CellMap::of_cell(mesh, c)?;
        for (node, &dof) in nodes.iter().zip(dofmap.cell_dofs(c)) {
            coeffs[dof] = f(&map.to_physical(node), t);
        }
    }
    Ok(coeffs)
}

/// Quadrature on facet `i` of the reference simplex: points and weights
/// (weights already include the facet measure), plus the outward unit normal.
pub fn reference_facet_quadrature(dim: usize, i: usize, degree: usize) -> (Vec<Point>, Vec<f64>, Point) {
    let mut verts: Vec<Point> = vec![[0.0; 3]];
    for k in 0..dim {
        let mut v = [0.0; 3];
        v[k] = 1.0;
        verts.push(v);
    }
    let facet: Vec<Point> = (0..=dim).filter(|&j| j != i).map(|j| verts[j]).collect();
    let mut normal = [0.0; 3];
    if i == 0 {
        for k in 0..dim {
            normal[k] = 1.0 / (dim as f64).sqrt();
        }
    } else {
        normal[i - 1] = -1.0;
    }
    let measure = match (dim, i) {
        (2, 0) => std::f64::consts::SQRT_2,
        (3, 0) => 3f64.sqrt() / 2.0,
        (2, _) => 1.0,
        _ => 0.5,
    };
    let mut points = Vec::new();
    let mut weights = Vec::new();
    if dim == 2 {
        let (s, w) = quadrature::gauss_legendre_unit(degree / 2 + 1);
        for (s, w) in s.iter().zip(&w) {
            points.push([
                facet[0][0] + s * (facet[1][0] - facet[0][0]),
                facet[0][1] + s * (facet[1][1] - facet[0][1]),
                0.0,
            ]);
            weights.push(w * measure);
        }
    } else {
        let rule = quadrature_rule(2, degree.min(quadrature::MAX_DEGREE_2D)).expect("facet rule");
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let mut x = facet[0];
            for k in 0..3 {
                x[k] += p[0] * (facet[1][k] - facet[0][k]) + p[1] * (facet[2][k] - facet[0][k]);
            }
            points.push(x);
            // reference-triangle weights sum to 1/2
            weights.push(2.0 * w * measure);
        }
    }
    (points, weights, normal)
}

/// Interpolates a vector field into a Raviart-Thomas space by applying the
/// degree-of-freedom functionals.
pub fn interpolate_rt(
    mesh: &Mesh,
    dofmap: &DofMap,
    v: impl Fn(&Point) -> Point,
) -> Result<Vec<f64>> {
    let dim = mesh.dim();
    let mut coeffs = vec![0.0; dofmap.n_dofs()];
    for c in 0..mesh.n_cells() {
        let map = CellMap::of_cell(mesh, c)?;
        let pulled = |xi: &Point| raviart_thomas::inverse_piola(&map, &v(&map.to_physical(xi)));
        let local: Vec<f64> = match dofmap.space() {
            FeSpace::RaviartThomas(0) => (0..=dim)
                .map(|i| {
                    let (pts, wts, n) = reference_facet_quadrature(dim, i, 6);
                    pts.iter().zip(&wts).map(|(p, w)| w * dot(&pulled(p), &n)).sum()
                })
                .collect(),
            FeSpace::RaviartThomas(1) => raviart_thomas::rt1_functionals(pulled).to_vec(),
            _ => {
                return Err(Error::InvalidArgument(
                    "RT interpolation needs a Raviart-Thomas space".into(),
                ))
            }
        };
        for ((d, s), value) in dofmap.cell_dofs(c).iter().zip(dofmap.cell_signs(c)).zip(local) {
            coeffs[*d] = s * value;
        }
    }
    Ok(coeffs)
}
