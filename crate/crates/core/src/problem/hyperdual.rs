//! Forward-mode automatic differentiation with first- and second-order jets.
//!
//! [`Jet1`] carries a value and a gradient over `N` independent variables,
//! [`Jet2`] additionally carries the full Hessian. Expressions are written
//! once against the [`Scalar`] trait and evaluated with `f64`, `Jet1` or
//! `Jet2`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Arithmetic needed by the manufactured-solution expressions.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn constant(value: f64) -> Self;
    fn value(&self) -> f64;
    fn exp(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn sqrt(self) -> Self;
}

impl Scalar for f64 {
    fn constant(value: f64) -> Self {
        value
    }
    fn value(&self) -> f64 {
        *self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// Value and gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1<const N: usize> {
    pub v: f64,
    pub g: [f64; N],
}

/// Value, gradient and Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2<const N: usize> {
    pub v: f64,
    pub g: [f64; N],
    pub h: [[f64; N]; N],
}

impl<const N: usize> Jet1<N> {
    pub fn variable(value: f64, index: usize) -> Self {
        let mut g = [0.0; N];
        g[index] = 1.0;
        Jet1 { v: value, g }
    }

    /// Applies a scalar function given its value and first derivative.
    #[inline]
    fn chain(self, f: f64, df: f64) -> Self {
        Jet1 { v: f, g: self.g.map(|x| df * x) }
    }
}

impl<const N: usize> Jet2<N> {
    pub fn variable(value: f64, index: usize) -> Self {
        let mut g = [0.0; N];
        g[index] = 1.0;
        Jet2 { v: value, g, h: [[0.0; N]; N] }
    }

    /// Drops the Hessian.
    pub fn first_order(&self) -> Jet1<N> {
        Jet1 { v: self.v, g: self.g }
    }

    /// The partial derivative along variable `k`, as a first-order jet.
    pub fn partial(&self, k: usize) -> Jet1<N> {
        Jet1 { v: self.g[k], g: self.h[k] }
    }

    /// Applies a scalar function given its value and first two derivatives.
    #[inline]
    fn chain(self, f: f64, df: f64, d2f: f64) -> Self {
        let mut h = [[0.0; N]; N];
        for i in 0..N {
            for j in 0..N {
                h[i][j] = df * self.h[i][j] + d2f * self.g[i] * self.g[j];
            }
        }
        Jet2 { v: f, g: self.g.map(|x| df * x), h }
    }

    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn is_finite(&self) -> bool {
        self.v.is_finite()
            && self.g.iter().all(|x| x.is_finite())
            && self.h.iter().flatten().all(|x| x.is_finite())
    }
}

impl<const N: usize> Jet1<N> {
    fn recip(self) -> Self {
        let r = 1.0 / self.v;
        self.chain(r, -r * r)
    }
}

macro_rules! impl_common_ops {
    ($jet:ident) => {
        impl<const N: usize> Add for $jet<N> {
            type Output = Self;
            #[inline]
            fn add(mut self, rhs: Self) -> Self {
                self.v += rhs.v;
                for i in 0..N {
                    self.g[i] += rhs.g[i];
                }
                self.add_second(&rhs, 1.0);
                self
            }
        }

        impl<const N: usize> Sub for $jet<N> {
            type Output = Self;
            #[inline]
            fn sub(mut self, rhs: Self) -> Self {
                self.v -= rhs.v;
                for i in 0..N {
                    self.g[i] -= rhs.g[i];
                }
                self.add_second(&rhs, -1.0);
                self
            }
        }

        impl<const N: usize> Neg for $jet<N> {
            type Output = Self;
            #[inline]
            fn neg(self) -> Self {
                self * -1.0
            }
        }

        impl<const N: usize> Div for $jet<N> {
            type Output = Self;
            #[inline]
            fn div(self, rhs: Self) -> Self {
                self * rhs.recip()
            }
        }

        impl<const N: usize> Add<f64> for $jet<N> {
            type Output = Self;
            #[inline]
            fn add(mut self, rhs: f64) -> Self {
                self.v += rhs;
                self
            }
        }

        impl<const N: usize> Sub<f64> for $jet<N> {
            type Output = Self;
            #[inline]
            fn sub(mut self, rhs: f64) -> Self {
                self.v -= rhs;
                self
            }
        }

        impl<const N: usize> Div<f64> for $jet<N> {
            type Output = Self;
            #[inline]
            fn div(self, rhs: f64) -> Self {
                self * (1.0 / rhs)
            }
        }
    };
}

impl_common_ops!(Jet1);
impl_common_ops!(Jet2);

impl<const N: usize> Jet1<N> {
    #[inline]
    fn add_second(&mut self, _rhs: &Self, _sign: f64) {}
}

impl<const N: usize> Jet2<N> {
    #[inline]
    fn add_second(&mut self, rhs: &Self, sign: f64) {
        for i in 0..N {
            for j in 0..N {
                self.h[i][j] += sign * rhs.h[i][j];
            }
        }
    }
}

impl<const N: usize> Mul for Jet1<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut g = [0.0; N];
        for i in 0..N {
            g[i] = self.v * rhs.g[i] + rhs.v * self.g[i];
        }
        Jet1 { v: self.v * rhs.v, g }
    }
}

impl<const N: usize> Mul<f64> for Jet1<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: f64) -> Self {
        Jet1 { v: self.v * rhs, g: self.g.map(|x| x * rhs) }
    }
}

impl<const N: usize> Mul for Jet2<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut g = [0.0; N];
        let mut h = [[0.0; N]; N];
        for i in 0..N {
            g[i] = self.v * rhs.g[i] + rhs.v * self.g[i];
            for j in 0..N {
                h[i][j] = self.v * rhs.h[i][j]
                    + rhs.v * self.h[i][j]
                    + self.g[i] * rhs.g[j]
                    + rhs.g[i] * self.g[j];
            }
        }
        Jet2 { v: self.v * rhs.v, g, h }
    }
}

impl<const N: usize> Mul<f64> for Jet2<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: f64) -> Self {
        Jet2 {
            v: self.v * rhs,
            g: self.g.map(|x| x * rhs),
            h: self.h.map(|row| row.map(|x| x * rhs)),
        }
    }
}

impl<const N: usize> Scalar for Jet1<N> {
    fn constant(value: f64) -> Self {
        Jet1 { v: value, g: [0.0; N] }
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(1.0),
            1 => self,
            _ => self.chain(self.v.powi(n), n as f64 * self.v.powi(n - 1)),
        }
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s)
    }
}

impl<const N: usize> Scalar for Jet2<N> {
    fn constant(value: f64) -> Self {
        Jet2 { v: value, g: [0.0; N], h: [[0.0; N]; N] }
    }
    fn value(&self) -> f64 {
        self.v
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(1.0),
            1 => self,
            _ => {
                let nf = n as f64;
                self.chain(
                    self.v.powi(n),
                    nf * self.v.powi(n - 1),
                    nf * (nf - 1.0) * self.v.powi(n - 2),
                )
            }
        }
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }
}

/// Evaluates `expr` at the point `(x, t)` with a second-order jet over the
/// variables `x_0, ..., x_{N-2}, t`.
///
/// Fails if the result is not finite (division by zero and the like).
pub fn hyperdual_eval<const N: usize>(
    expr: impl Fn(&[Jet2<N>], Jet2<N>) -> Jet2<N>,
    x: &[f64],
    t: f64,
) -> Result<Jet2<N>> {
    assert_eq!(x.len() + 1, N, "jet width must be the spatial dimension plus one");
    let vars: Vec<Jet2<N>> = x.iter().enumerate().map(|(k, &xk)| Jet2::variable(xk, k)).collect();
    let out = expr(&vars, Jet2::variable(t, N - 1));
    if out.is_finite() {
        Ok(out)
    } else {
        Err(Error::DivisionByZero)
    }
}
