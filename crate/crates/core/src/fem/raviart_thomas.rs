//! Raviart-Thomas elements: RT0 on triangles and tetrahedra, RT1 on triangles.
//!
//! Degrees of freedom of the reference element:
//!
//! * RT0: the outward normal flux through facet `i` (opposite vertex `i`).
//! * RT1: for each edge `i` with endpoints `a < b`, the normal moments
//!   `∫ (v·n) λ_a ds` and `∫ (v·n) λ_b ds` (local dofs `2i`, `2i + 1`),
//!   followed by the interior moments `∫ v_x` and `∫ v_y`.
//!
//! Tying the edge moments to the edge endpoints makes the functionals
//! independent of the cell they are evaluated from, up to the sign of the
//! normal.

use std::sync::OnceLock;

use crate::fem::lagrange::P2_EDGES_2D;
use crate::fem::quadrature::gauss_legendre_unit;
use crate::geometry::{CellMap, Point};
use crate::linalg::dense::DenseMatrix;

pub fn local_dim(dim: usize, degree: usize) -> usize {
    match (dim, degree) {
        (d, 0) => d + 1,
        (2, 1) => 8,
        _ => panic!("RT{degree} is not provided in dimension {dim}"),
    }
}

/// Values and divergences of the reference basis at `xi`.
pub fn rt_eval(degree: usize, dim: usize, xi: &Point) -> (Vec<Point>, Vec<f64>) {
    match (degree, dim) {
        (0, 2) | (0, 3) => rt0_eval(dim, xi),
        (1, 2) => rt1_eval(xi),
        _ => panic!("RT{degree} is not provided in dimension {dim}"),
    }
}

fn rt0_eval(dim: usize, xi: &Point) -> (Vec<Point>, Vec<f64>) {
    // phi_i = (xi - v_i) / (d |K|), scaled so the flux through facet i is one.
    let scale = if dim == 2 { 1.0 } else { 2.0 };
    let div = scale * dim as f64;
    let mut values = Vec::with_capacity(dim + 1);
    for i in 0..=dim {
        let mut v = [0.0; 3];
        for k in 0..dim {
            let vertex_k = if i > 0 && k == i - 1 { 1.0 } else { 0.0 };
            v[k] = scale * (xi[k] - vertex_k);
        }
        values.push(v);
    }
    (values, vec![div; dim + 1])
}

/// Spanning set of RT1 on the triangle: `[P1]^2 + x P1~`.
fn rt1_span(xi: &Point) -> ([Point; 8], [f64; 8]) {
    let (x, y) = (xi[0], xi[1]);
    (
        [
            [1.0, 0.0, 0.0],
            [x, 0.0, 0.0],
            [y, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, x, 0.0],
            [0.0, y, 0.0],
            [x * x, x * y, 0.0],
            [x * y, y * y, 0.0],
        ],
        [0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 3.0 * x, 3.0 * y],
    )
}

/// Outward unit normal and length of reference triangle edge `i`.
pub(crate) fn reference_edge(i: usize) -> (Point, f64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match i {
        0 => ([s, s, 0.0], std::f64::consts::SQRT_2),
        1 => ([-1.0, 0.0, 0.0], 1.0),
        2 => ([0.0, -1.0, 0.0], 1.0),
        _ => unreachable!(),
    }
}

fn reference_vertex(i: usize) -> Point {
    match i {
        0 => [0.0, 0.0, 0.0],
        1 => [1.0, 0.0, 0.0],
        2 => [0.0, 1.0, 0.0],
        _ => unreachable!(),
    }
}

/// Applies the eight RT1 reference functionals to a vector field given on
/// the reference triangle.
pub(crate) fn rt1_functionals(v: impl Fn(&Point) -> Point) -> [f64; 8] {
    let (pts, wts) = gauss_legendre_unit(4);
    let mut out = [0.0; 8];
    for (i, [a, b]) in P2_EDGES_2D.iter().enumerate() {
        let (n, len) = reference_edge(i);
        let (va, vb) = (reference_vertex(*a), reference_vertex(*b));
        for (s, w) in pts.iter().zip(&wts) {
            // s runs from a (s = 0) to b (s = 1); lambda_a = 1 - s, lambda_b = s.
            let p = [va[0] + s * (vb[0] - va[0]), va[1] + s * (vb[1] - va[1]), 0.0];
            let f = v(&p);
            let vn = f[0] * n[0] + f[1] * n[1];
            out[2 * i] += w * len * vn * (1.0 - s);
            out[2 * i + 1] += w * len * vn * s;
        }
    }
    let rule = crate::fem::quadrature::quadrature_rule(2, 4).expect("degree-4 triangle rule");
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let f = v(p);
        out[6] += w * f[0];
        out[7] += w * f[1];
    }
    out
}

/// Coefficients of the nodal RT1 basis in terms of the spanning set.
fn rt1_coefficients() -> &'static DenseMatrix {
    static COEFFS: OnceLock<DenseMatrix> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut dual = DenseMatrix::zeros(8, 8);
        for k in 0..8 {
            let column = rt1_functionals(|p| rt1_span(p).0[k]);
            for (i, value) in column.iter().enumerate() {
                dual[(i, k)] = *value;
            }
        }
        dual.inverse().expect("RT1 dual matrix is unisolvent")
    })
}

fn rt1_eval(xi: &Point) -> (Vec<Point>, Vec<f64>) {
    let c = rt1_coefficients();
    let (span, span_div) = rt1_span(xi);
    let mut values = vec![[0.0; 3]; 8];
    let mut divs = vec![0.0; 8];
    for j in 0..8 {
        for k in 0..8 {
            let ckj = c[(k, j)];
            values[j][0] += ckj * span[k][0];
            values[j][1] += ckj * span[k][1];
            divs[j] += ckj * span_div[k];
        }
    }
    (values, divs)
}

/// Contravariant Piola map of a reference vector: `J v / det J`.
#[inline]
pub fn piola_map(map: &CellMap, v_ref: &Point) -> Point {
    let mut out = [0.0; 3];
    for i in 0..map.dim {
        for j in 0..map.dim {
            out[i] += map.jac[i][j] * v_ref[j];
        }
        out[i] /= map.det;
    }
    out
}

/// Divergence after the Piola map: `div_ref / det J`.
#[inline]
pub fn piola_divergence(map: &CellMap, div_ref: f64) -> f64 {
    div_ref / map.det
}

/// Inverse Piola map, `det J · J^{-1} v`.
pub fn inverse_piola(map: &CellMap, v: &Point) -> Point {
    let mut out = [0.0; 3];
    for i in 0..map.dim {
        for j in 0..map.dim {
            out[i] += map.inv[i][j] * v[j];
        }
        out[i] *= map.det;
    }
    out
}
