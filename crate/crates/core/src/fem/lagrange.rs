//! Lagrange basis functions on the reference simplex.
//!
//! Local ordering: vertex functions first (vertex `i` of the reference
//! simplex), then for P2 one function per edge, edge `i` being the edge
//! opposite vertex `i` in 2D.

use crate::geometry::Point;

/// Barycentric coordinates and their (constant) reference gradients.
pub fn barycentric(dim: usize, xi: &Point) -> ([f64; 4], [Point; 4]) {
    let mut lam = [0.0; 4];
    let mut grad = [[0.0; 3]; 4];
    lam[0] = 1.0 - xi[..dim].iter().sum::<f64>();
    for k in 0..dim {
        lam[k + 1] = xi[k];
        grad[0][k] = -1.0;
        grad[k + 1][k] = 1.0;
    }
    (lam, grad)
}

/// Local vertex pair of each P2 edge function in 2D.
pub const P2_EDGES_2D: [[usize; 2]; 3] = [[1, 2], [0, 2], [0, 1]];

/// Number of local Lagrange functions.
pub fn local_dim(dim: usize, degree: usize) -> usize {
    match (dim, degree) {
        (_, 0) => 1,
        (d, 1) => d + 1,
        (2, 2) => 6,
        (3, 2) => 10,
        _ => panic!("unsupported Lagrange degree {degree} in dimension {dim}"),
    }
}

/// Values and reference gradients of all local basis functions of degree 0,
/// 1 or 2 (degree 2 only in 2D).
pub fn lagrange_eval(dim: usize, degree: usize, xi: &Point) -> (Vec<f64>, Vec<Point>) {
    let (lam, dlam) = barycentric(dim, xi);
    match degree {
        0 => (vec![1.0], vec![[0.0; 3]]),
        1 => (lam[..=dim].to_vec(), dlam[..=dim].to_vec()),
        2 => {
            assert_eq!(dim, 2, "P2 is only provided on triangles");
            let mut values = Vec::with_capacity(6);
            let mut grads = Vec::with_capacity(6);
            for i in 0..3 {
                values.push(lam[i] * (2.0 * lam[i] - 1.0));
                let s = 4.0 * lam[i] - 1.0;
                grads.push([s * dlam[i][0], s * dlam[i][1], 0.0]);
            }
            for [a, b] in P2_EDGES_2D {
                values.push(4.0 * lam[a] * lam[b]);
                grads.push([
                    4.0 * (dlam[a][0] * lam[b] + lam[a] * dlam[b][0]),
                    4.0 * (dlam[a][1] * lam[b] + lam[a] * dlam[b][1]),
                    0.0,
                ]);
            }
            (values, grads)
        }
        _ => panic!("unsupported Lagrange degree {degree}"),
    }
}

/// Reference coordinates of the nodes of the local basis.
pub fn lagrange_nodes(dim: usize, degree: usize) -> Vec<Point> {
    let mut verts = vec![[0.0; 3]];
    for k in 0..dim {
        let mut v = [0.0; 3];
        v[k] = 1.0;
        verts.push(v);
    }
    match degree {
        0 => {
            let c = 1.0 / (dim as f64 + 1.0);
            vec![[c, c, if dim == 3 { c } else { 0.0 }]]
        }
        1 => verts,
        2 => {
            let mut nodes = verts.clone();
            for [a, b] in P2_EDGES_2D {
                let (va, vb) = (verts[a], verts[b]);
                nodes.push([0.5 * (va[0] + vb[0]), 0.5 * (va[1] + vb[1]), 0.0]);
            }
            nodes
        }
        _ => panic!("unsupported Lagrange degree {degree}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn nodal_kronecker_property() {
        for (dim, degree) in [(2, 1), (3, 1), (2, 2)] {
            let nodes = lagrange_nodes(dim, degree);
            for (j, node) in nodes.iter().enumerate() {
                let (values, _) = lagrange_eval(dim, degree, node);
                for (i, v) in values.iter().enumerate() {
                    assert_abs_diff_eq!(*v, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn p2_vertex_functions_vanish_at_midpoints() {
        for mid in &lagrange_nodes(2, 2)[3..] {
            let (values, _) = lagrange_eval(2, 2, mid);
            for v in &values[..3] {
                assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn p2_gradients_match_finite_differences() {
        let xi = [0.2, 0.3, 0.0];
        let (_, grads) = lagrange_eval(2, 2, &xi);
        let eps = 1e-6;
        for k in 0..2 {
            let mut xp = xi;
            let mut xm = xi;
            xp[k] += eps;
            xm[k] -= eps;
            let (vp, _) = lagrange_eval(2, 2, &xp);
            let (vm, _) = lagrange_eval(2, 2, &xm);
            for i in 0..6 {
                assert_abs_diff_eq!((vp[i] - vm[i]) / (2.0 * eps), grads[i][k], epsilon = 1e-8);
            }
        }
    }

    proptest! {
        #[test]
        fn partition_of_unity(a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
            for (dim, degree) in [(2, 1), (2, 2), (3, 1)] {
                // fold the sample into the reference simplex
                let s = a + b + if dim == 3 { c } else { 0.0 };
                let scale = if s > 1.0 { 1.0 / s } else { 1.0 };
                let xi = [a * scale, b * scale, if dim == 3 { c * scale } else { 0.0 }];
                let (values, grads) = lagrange_eval(dim, degree, &xi);
                prop_assert!((values.iter().sum::<f64>() - 1.0).abs() < 1e-13);
                for k in 0..dim {
                    let g: f64 = grads.iter().map(|g| g[k]).sum();
                    prop_assert!(g.abs() < 1e-13);
                }
            }
        }
    }
}
