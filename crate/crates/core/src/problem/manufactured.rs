//! Manufactured smooth solutions and the forcing terms they induce.
//!
//! The model is the rewritten system with unit porosity and permeability:
//!
//! ```text
//! c_t - div(D(u) grad c) + u · grad c = g
//! div u = f
//! u = -grad p / mu(c)
//! ```
//!
//! with `mu(c) = 1 + c^2` and `D(u) = (1 + |u|^2 / (1 + |u|^2)) I + u ⊗ u`.
//! `f` and `g` are computed pointwise with forward-mode AD: second-order
//! jets of `p` and `c` give first-order jets of `u` and of the diffusive
//! flux, whose gradients supply the divergences.

use std::sync::Arc;

use crate::fem::quadrature_rule;
use crate::geometry::{CellMap, Point};
use crate::mesh::Mesh;
use crate::problem::coefficients::Coefficients;
use crate::problem::hyperdual::{Jet1, Jet2, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Example {
    /// Two-dimensional unit square.
    Ex51,
    /// Three-dimensional unit cube.
    Ex52,
}

impl Example {
    pub fn dim(self) -> usize {
        match self {
            Example::Ex51 => 2,
            Example::Ex52 => 3,
        }
    }

    pub fn id(self) -> &'static str {
        match self {
            Example::Ex51 => "5.1",
            Example::Ex52 => "5.2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "5.1" => Some(Example::Ex51),
            "5.2" => Some(Example::Ex52),
            _ => None,
        }
    }
}

/// `s^2 (1 - s)^k`
fn bump<S: Scalar>(s: S, k: i32) -> S {
    s.powi(2) * (S::constant(1.0) - s).powi(k)
}

/// Exact pressure.
pub fn pressure_expr<S: Scalar>(x: &[S], t: S) -> S {
    let mut space = S::constant(1000.0);
    for &xi in x {
        space = space * bump(xi, 3);
    }
    space * t.powi(2) * (-t).exp() + 1.0
}

/// Exact concentration.
pub fn concentration_expr<S: Scalar>(x: &[S], t: S) -> S {
    let mut space = S::constant(50.0);
    for &xi in x {
        space = space * bump(xi, 2);
    }
    space * t * t.exp() + 0.2
}

pub fn viscosity_expr<S: Scalar>(c: S) -> S {
    c * c + 1.0
}

/// Molecular diffusion profile as a function of the squared speed.
pub fn d_mt_expr<S: Scalar>(speed_sq: S) -> S {
    speed_sq / (speed_sq + 1.0) + 1.0
}

/// Longitudinal dispersion profile as a function of the squared speed.
pub fn d_lt_expr<S: Scalar>(_speed_sq: S) -> S {
    S::constant(1.0)
}

/// Pointwise exact data at one `(x, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactValues {
    pub p: f64,
    pub c: f64,
    pub u: Point,
    pub f: f64,
    pub g: f64,
}

/// Derived fields of one manufactured solution; `N` is the spatial
/// dimension plus one (for time).
fn exact_values<const N: usize>(x: &Point, t: f64) -> ExactValues {
    let d = N - 1;
    let vars: Vec<Jet2<N>> = (0..d).map(|k| Jet2::variable(x[k], k)).collect();
    let time = Jet2::variable(t, d);
    let p = pressure_expr(&vars, time);
    let c = concentration_expr(&vars, time);

    let c1 = c.first_order();
    let mu = viscosity_expr(c1);
    let mut u = [Jet1::<N>::constant(0.0); 3];
    let mut speed_sq = Jet1::<N>::constant(0.0);
    for k in 0..d {
        u[k] = -p.partial(k) / mu;
        speed_sq = speed_sq + u[k] * u[k];
    }
    let f: f64 = (0..d).map(|k| u[k].g[k]).sum();

    let dmt = d_mt_expr(speed_sq);
    let dlt = d_lt_expr(speed_sq);
    let mut div_flux = 0.0;
    for i in 0..d {
        let mut flux = Jet1::<N>::constant(0.0);
        for j in 0..d {
            let mut dij = dlt * u[i] * u[j];
            if i == j {
                dij = dij + dmt;
            }
            flux = flux + dij * c.partial(j);
        }
        div_flux += flux.g[i];
    }
    let convection: f64 = (0..d).map(|k| u[k].v * c.g[k]).sum();
    let g = c.g[d] - div_flux + convection;

    let mut uv = [0.0; 3];
    for k in 0..d {
        uv[k] = u[k].v;
    }
    ExactValues { p: p.v, c: c.v, u: uv, f, g }
}

/// One of the manufactured test problems on the unit square or cube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    pub example: Example,
    pub final_time: f64,
}

impl ManufacturedCase {
    pub fn new(example: Example) -> Self {
        ManufacturedCase { example, final_time: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.example.dim()
    }

    pub fn exact(&self, x: &Point, t: f64) -> ExactValues {
        match self.example {
            Example::Ex51 => exact_values::<3>(x, t),
            Example::Ex52 => exact_values::<4>(x, t),
        }
    }

    pub fn pressure(&self, x: &Point, t: f64) -> f64 {
        pressure_expr(&x[..self.dim()], t)
    }

    pub fn concentration(&self, x: &Point, t: f64) -> f64 {
        concentration_expr(&x[..self.dim()], t)
    }

    pub fn velocity(&self, x: &Point, t: f64) -> Point {
        self.exact(x, t).u
    }

    /// `f = div u`
    pub fn darcy_source(&self, x: &Point, t: f64) -> f64 {
        self.exact(x, t).f
    }

    /// `g = c_t - div(D(u) grad c) + u · grad c`
    pub fn transport_source(&self, x: &Point, t: f64) -> f64 {
        self.exact(x, t).g
    }

    /// Spatial mean of the exact pressure at time `t`, using
    /// `∫_0^1 s^2 (1 - s)^3 ds = 1/60`.
    pub fn pressure_mean(&self, t: f64) -> f64 {
        1.0 + 1000.0 * (1.0f64 / 60.0).powi(self.dim() as i32) * t * t * (-t).exp()
    }

    /// Scheme coefficients: unit porosity and permeability, `q^P = 0`, and
    /// the manufactured `f`, `g` as sources.
    pub fn coefficients(&self) -> Coefficients {
        let case = *self;
        let case2 = *self;
        Coefficients {
            porosity: Arc::new(|_| 1.0),
            permeability: Arc::new(|_| 1.0),
            viscosity: Arc::new(viscosity_expr::<f64>),
            d_mt: Arc::new(|z: f64| d_mt_expr(z * z)),
            d_lt: Arc::new(|z: f64| d_lt_expr(z * z)),
            darcy_source: Arc::new(move |x, t| case.darcy_source(x, t)),
            transport_source: Arc::new(move |x, t| case2.transport_source(x, t)),
            production: Arc::new(|_, _| 0.0),
        }
    }

    /// Integral of `f` over the domain at time `t`; zero for a compatible
    /// source since `u · n = 0` on the boundary.
    pub fn check_compatibility(&self, t: f64) -> f64 {
        domain_integral(self.dim(), |x| self.darcy_source(x, t))
    }

    /// Points on the boundary of the unit box, with outward unit normals.
    pub fn boundary_samples(&self, per_face: usize) -> Vec<(Point, Point)> {
        let d = self.dim();
        let mut out = Vec::new();
        for axis in 0..d {
            for side in [0.0, 1.0] {
                for k in 0..per_face {
                    let s = (k as f64 + 0.5) / per_face as f64;
                    let mut x = [0.0; 3];
                    for j in 0..d {
                        x[j] = if j == axis { side } else { (s * (j as f64 + 1.3)).fract() };
                    }
                    let mut n = [0.0; 3];
                    n[axis] = if side == 0.0 { -1.0 } else { 1.0 };
                    out.push((x, n));
                }
            }
        }
        out
    }
}

/// Integral over the unit square or cube: the highest supported rule on a
/// 16-per-side structured mesh.
pub fn domain_integral(dim: usize, f: impl Fn(&Point) -> f64) -> f64 {
    let mesh = Mesh::structured(dim, 16).expect("structured mesh");
    let degree = if dim == 2 { 8 } else { 6 };
    let rule = quadrature_rule(dim, degree).expect("supported degree");
    let mut total = 0.0;
    for c in 0..mesh.n_cells() {
        let map = CellMap::of_cell(&mesh, c).expect("valid cell");
        let local: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| w * f(&map.to_physical(p)))
            .sum();
        total += local * map.det;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::dot;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn initial_concentration_is_constant() {
        for ex in [Example::Ex51, Example::Ex52] {
            let case = ManufacturedCase::new(ex);
            assert_eq!(case.concentration(&[0.3, 0.6, 0.2], 0.0), 0.2);
        }
    }

    #[test]
    fn pressure_at_center() {
        let case = ManufacturedCase::new(Example::Ex51);
        let expected = 1.0 + 1000.0 * 0.03125f64.powi(2) * (-1.0f64).exp();
        assert_abs_diff_eq!(case.pressure(&[0.5, 0.5, 0.0], 1.0), expected, epsilon = 1e-14);
    }

    #[test]
    fn boundary_conditions_hold() {
        for ex in [Example::Ex51, Example::Ex52] {
            let case = ManufacturedCase::new(ex);
            let coeffs = case.coefficients();
            for (x, n) in case.boundary_samples(7) {
                let e = case.exact(&x, 0.8);
                assert!(dot(&e.u, &n).abs() <= 1e-12);
                // grad c vanishes on the boundary, so the diffusive flux does too
                let h = 1e-6;
                let mut flux_n = 0.0;
                let dmat = coeffs.dispersion_tensor(&e.u, &x, case.dim());
                for j in 0..case.dim() {
                    let mut xp = x;
                    let mut xm = x;
                    xp[j] += h;
                    xm[j] -= h;
                    let dc = (case.concentration(&xp, 0.8) - case.concentration(&xm, 0.8)) / (2.0 * h);
                    for i in 0..case.dim() {
                        flux_n += n[i] * dmat[i][j] * dc;
                    }
                }
                assert!(flux_n.abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn darcy_source_matches_fd_divergence() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for ex in [Example::Ex51, Example::Ex52] {
            let case = ManufacturedCase::new(ex);
            for _ in 0..20 {
                let x = [rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95)];
                let t = rng.gen_range(0.1..1.0);
                let h = 1e-5;
                let mut div = 0.0;
                for k in 0..case.dim() {
                    let mut xp = x;
                    let mut xm = x;
                    xp[k] += h;
                    xm[k] -= h;
                    div += (case.velocity(&xp, t)[k] - case.velocity(&xm, t)[k]) / (2.0 * h);
                }
                assert_abs_diff_eq!(case.darcy_source(&x, t), div, epsilon = 1e-5);
            }
        }
    }

    #[test]
    fn pressure_mean_matches_quadrature() {
        for ex in [Example::Ex51, Example::Ex52] {
            let case = ManufacturedCase::new(ex);
            let numeric = domain_integral(case.dim(), |x| case.pressure(x, 0.7));
            assert_abs_diff_eq!(case.pressure_mean(0.7), numeric, epsilon = 1e-12);
        }
    }

    #[test]
    fn sources_are_compatible() {
        assert!(ManufacturedCase::new(Example::Ex51).check_compatibility(1.0).abs() <= 1e-10);
        assert!(ManufacturedCase::new(Example::Ex52).check_compatibility(0.5).abs() <= 1e-10);
        let case = ManufacturedCase::new(Example::Ex51);
        let shifted = domain_integral(2, |x| case.darcy_source(x, 1.0) + 1.0);
        assert_abs_diff_eq!(shifted, 1.0, epsilon = 1e-10);
    }
}
