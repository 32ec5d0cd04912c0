//! Coefficient model of the coupled Darcy/transport system.

use std::fmt;
use std::sync::Arc;

use crate::geometry::{dot, Point};

pub type SpaceField = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type SpaceTimeField = Arc<dyn Fn(&Point, f64) -> f64 + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// PDE data.
///
/// The dispersion profiles `d_mt` and `d_lt` take the speed `|u|` and must be
/// evaluable at zero. Sources are kept in the form the scheme consumes:
/// `darcy_source = q^I - q^P`, `transport_source = ĉ q^I` and
/// `production = q^P` (the reaction coefficient of the transport equation).
#[derive(Clone)]
pub struct Coefficients {
    pub porosity: SpaceField,
    pub permeability: SpaceField,
    pub viscosity: ScalarFn,
    pub d_mt: ScalarFn,
    pub d_lt: ScalarFn,
    pub darcy_source: SpaceTimeField,
    pub transport_source: SpaceTimeField,
    pub production: SpaceTimeField,
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coefficients").finish_non_exhaustive()
    }
}

impl Coefficients {
    /// Unit porosity, permeability and viscosity, unit molecular diffusion,
    /// no dispersion and no sources.
    pub fn unit() -> Self {
        Coefficients {
            porosity: Arc::new(|_| 1.0),
            permeability: Arc::new(|_| 1.0),
            viscosity: Arc::new(|_| 1.0),
            d_mt: Arc::new(|_| 1.0),
            d_lt: Arc::new(|_| 0.0),
            darcy_source: Arc::new(|_, _| 0.0),
            transport_source: Arc::new(|_, _| 0.0),
            production: Arc::new(|_, _| 0.0),
        }
    }

    /// Sets injection/production wells `q^I`, `q^P` and the injected
    /// concentration `ĉ`.
    pub fn with_wells(
        mut self,
        injection: SpaceTimeField,
        production: SpaceTimeField,
        injected_concentration: SpaceTimeField,
    ) -> Self {
        let (qi, qp) = (injection.clone(), production.clone());
        self.darcy_source = Arc::new(move |x, t| qi(x, t) - qp(x, t));
        let qi = injection;
        self.transport_source = Arc::new(move |x, t| injected_concentration(x, t) * qi(x, t));
        self.production = production;
        self
    }

    /// `D(u) = Φ (d_mt(|u|) I + d_lt(|u|) u ⊗ u)` at `x`.
    pub fn dispersion_tensor(&self, u: &Point, x: &Point, dim: usize) -> [[f64; 3]; 3] {
        let phi = (self.porosity)(x);
        dispersion(phi, (self.d_mt)(dot(u, u).sqrt()), (self.d_lt)(dot(u, u).sqrt()), u, dim)
    }

    /// Samples the bounds of the permeability and viscosity assumptions:
    /// returns `(k_min, k_max, mu_min, mu_max, d_mt_min)` over the given
    /// points, concentrations and speeds.
    pub fn sample_bounds(&self, points: &[Point], concentrations: &[f64], speeds: &[f64]) -> (f64, f64, f64, f64, f64) {
        let ks: Vec<f64> = points.iter().map(|x| (self.permeability)(x)).collect();
        let mus: Vec<f64> = concentrations.iter().map(|&c| (self.viscosity)(c)).collect();
        let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let dmt: Vec<f64> = speeds.iter().map(|&z| (self.d_mt)(z)).collect();
        (min(&ks), max(&ks), min(&mus), max(&mus), min(&dmt))
    }
}

/// `phi (d_mt I + d_lt u ⊗ u)` restricted to the leading `dim × dim` block.
#[inline]
pub fn dispersion(phi: f64, d_mt: f64, d_lt: f64, u: &Point, dim: usize) -> [[f64; 3]; 3] {
    let mut d = [[0.0; 3]; 3];
    for i in 0..dim {
        for j in 0..dim {
            d[i][j] = phi * d_lt * u[i] * u[j];
        }
        d[i][i] += phi * d_mt;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::manufactured::{Example, ManufacturedCase};
    use approx::assert_abs_diff_eq;

    #[test]
    fn example_profile_substitutions() {
        let coeffs = ManufacturedCase::new(Example::Ex51).coefficients();
        let x = [0.3, 0.4, 0.0];
        let d0 = coeffs.dispersion_tensor(&[0.0; 3], &x, 2);
        assert_eq!(d0[0], [1.0, 0.0, 0.0]);
        assert_eq!(d0[1], [0.0, 1.0, 0.0]);
        let d1 = coeffs.dispersion_tensor(&[1.0, 0.0, 0.0], &x, 2);
        assert_abs_diff_eq!(d1[0][0], 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d1[1][1], 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d1[0][1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn general_form_substitution() {
        let mut coeffs = Coefficients::unit();
        coeffs.porosity = Arc::new(|_| 2.0);
        coeffs.d_lt = Arc::new(|_| 1.0);
        let d = coeffs.dispersion_tensor(&[1.0, 1.0, 0.0], &[0.5; 3], 2);
        assert_eq!(d[0][0], 4.0);
        assert_eq!(d[0][1], 2.0);
        assert_eq!(d[1][0], 2.0);
        assert_eq!(d[1][1], 4.0);
    }

    #[test]
    fn dispersion_is_spd_with_bounded_spectrum() {
        let coeffs = ManufacturedCase::new(Example::Ex51).coefficients();
        let x = [0.5; 3];
        for k in 0..50 {
            let a = k as f64 * 0.37;
            let u = [a.cos() * a, a.sin() * 0.5 * a, 0.0];
            let d = coeffs.dispersion_tensor(&u, &x, 2);
            assert_eq!(d[0][1], d[1][0]);
            // smallest eigenvalue of a symmetric 2x2
            let tr = d[0][0] + d[1][1];
            let det = d[0][0] * d[1][1] - d[0][1] * d[1][0];
            let lmin = 0.5 * (tr - (tr * tr - 4.0 * det).max(0.0).sqrt());
            let floor = (coeffs.d_mt)(dot(&u, &u).sqrt());
            assert!(lmin >= floor - 1e-12 && floor > 0.0);
        }
    }

    #[test]
    fn wells_combine_into_sources() {
        let c = Coefficients::unit().with_wells(
            Arc::new(|_, _| 3.0),
            Arc::new(|_, _| 1.0),
            Arc::new(|_, _| 0.5),
        );
        let x = [0.1; 3];
        assert_eq!((c.darcy_source)(&x, 0.0), 2.0);
        assert_eq!((c.transport_source)(&x, 0.0), 1.5);
        assert_eq!((c.production)(&x, 0.0), 1.0);
    }

    #[test]
    fn example_coefficients_satisfy_bounds() {
        let coeffs = ManufacturedCase::new(Example::Ex51).coefficients();
        let pts: Vec<Point> = (0..20).map(|i| [i as f64 / 19.0, 0.5, 0.0]).collect();
        let cs: Vec<f64> = (0..20).map(|i| -2.0 + i as f64 * 0.2).collect();
        let speeds: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let (kmin, kmax, mumin, mumax, dmt) = coeffs.sample_bounds(&pts, &cs, &speeds);
        assert!(kmin > 0.0 && kmax < f64::INFINITY);
        assert!(mumin >= 1.0 && mumax <= 5.0);
        assert!(dmt > 0.0);
    }
}
