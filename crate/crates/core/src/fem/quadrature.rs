//! Symmetric quadrature rules on the reference triangle and tetrahedron.
//!
//! The reference simplex has vertices at the origin and the unit vectors, so
//! the weights sum to 1/2 in 2D and 1/6 in 3D.

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Highest polynomial degree supported on triangles.
pub const MAX_DEGREE_2D: usize = 8;
/// Highest polynomial degree supported on tetrahedra.
pub const MAX_DEGREE_3D: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub dim: usize,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// Every polynomial of total degree up to this is integrated exactly.
    pub degree: usize,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}

/// Returns a symmetric rule exact for polynomials up to `degree`.
///
/// Rules come from the polyquad tables (positive weights, interior points),
/// mapped from the `[-1, 1]` reference simplex onto the unit simplex.
pub fn quadrature_rule(dim: usize, degree: usize) -> Result<QuadRule> {
    // Degree 0 and 1 share the one-point centroid rule.
    let strength = degree.max(1);
    match dim {
        2 if degree <= MAX_DEGREE_2D => {
            let (w, p) = fenris_quadrature::polyquad::triangle(strength)
                .map_err(|_| unsupported(dim, degree))?;
            Ok(QuadRule {
                dim,
                points: p.iter().map(|x| [0.5 * (x[0] + 1.0), 0.5 * (x[1] + 1.0), 0.0]).collect(),
                weights: w.iter().map(|w| 0.25 * w).collect(),
                degree,
            })
        }
        3 if degree <= MAX_DEGREE_3D => {
            let (w, p) = fenris_quadrature::polyquad::tetrahedron(strength)
                .map_err(|_| unsupported(dim, degree))?;
            Ok(QuadRule {
                dim,
                points: p
                    .iter()
                    .map(|x| [0.5 * (x[0] + 1.0), 0.5 * (x[1] + 1.0), 0.5 * (x[2] + 1.0)])
                    .collect(),
                weights: w.iter().map(|w| 0.125 * w).collect(),
                degree,
            })
        }
        _ => Err(unsupported(dim, degree)),
    }
}

fn unsupported(dim: usize, degree: usize) -> Error {
    Error::Unsupported(format!("quadrature of degree {degree} in dimension {dim}"))
}

/// Gauss-Legendre rule on `[0, 1]` with `n` points, used for facet integrals
/// in 2D.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (w, p) = fenris_quadrature::univariate::gauss(n);
    (
        p.iter().map(|x| 0.5 * (x[0] + 1.0)).collect(),
        w.iter().map(|w| 0.5 * w).collect(),
    )
}
