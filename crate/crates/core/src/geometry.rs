//! Small fixed-size vector helpers and affine cell maps.
//!
//! Points are always stored with three components; in 2D the third one is
//! zero and ignored.

use crate::error::{Error, Result};
use crate::mesh::Mesh;

pub type Point = [f64; 3];

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

/// Affine map `x = origin + J xi` from the reference simplex onto a cell.
#[derive(Debug, Clone, Copy)]
pub struct CellMap {
    pub dim: usize,
    pub origin: Point,
    /// `jac[i][j] = dx_i / dxi_j`.
    pub jac: [[f64; 3]; 3],
    pub det: f64,
    pub inv: [[f64; 3]; 3],
}

impl CellMap {
    /// Builds the map from the vertex coordinates; the reference vertices are
    /// the origin followed by the unit vectors.
    pub fn from_vertices(dim: usize, vertices: &[Point]) -> Self {
        let origin = vertices[0];
        let mut jac = [[0.0; 3]; 3];
        for j in 0..dim {
            let e = sub(&vertices[j + 1], &origin);
            for i in 0..dim {
                jac[i][j] = e[i];
            }
        }
        let (det, inv) = if dim == 2 {
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            let mut inv = [[0.0; 3]; 3];
            inv[0][0] = jac[1][1] / det;
            inv[0][1] = -jac[0][1] / det;
            inv[1][0] = -jac[1][0] / det;
            inv[1][1] = jac[0][0] / det;
            (det, inv)
        } else {
            let a = jac;
            let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
            let mut inv = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    // cofactor transpose
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    inv[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / det;
                }
            }
            (det, inv)
        };
        CellMap {
            dim,
            origin,
            jac,
            det,
            inv,
        }
    }

    /// The map of cell `c`, rejecting degenerate or inverted cells.
    pub fn of_cell(mesh: &Mesh, c: usize) -> Result<Self> {
        let dim = mesh.dim();
        let mut verts = [[0.0; 3]; 4];
        for (k, &v) in mesh.cell(c).iter().enumerate() {
            verts[k] = *mesh.vertex(v);
        }
        let map = Self::from_vertices(dim, &verts[..dim + 1]);
        if !(map.det > 0.0) {
            return Err(Error::DegenerateCell { cell: c, det: map.det });
        }
        Ok(map)
    }

    pub fn to_physical(&self, xi: &Point) -> Point {
        let mut x = self.origin;
        for i in 0..self.dim {
            for j in 0..self.dim {
                x[i] += self.jac[i][j] * xi[j];
            }
        }
        x
    }

    pub fn to_reference(&self, x: &Point) -> Point {
        let d = sub(x, &self.origin);
        let mut xi = [0.0; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                xi[i] += self.inv[i][j] * d[j];
            }
        }
        xi
    }

    /// Physical gradient `J^{-T} g` of a scalar with reference gradient `g`.
    #[inline]
    pub fn push_gradient(&self, g: &Point) -> Point {
        let mut out = [0.0; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[i] += self.inv[j][i] * g[j];
            }
        }
        out
    }

    /// Absolute cell measure.
    pub fn volume(&self) -> f64 {
        let factorial = if self.dim == 2 { 2.0 } else { 6.0 };
        self.det.abs() / factorial
    }
}
