//! Galerkin-mixed finite element scheme for incompressible miscible
//! displacement in porous media.
//!
//! Pressure and Darcy velocity are approximated by a Raviart-Thomas mixed
//! method, the concentration by continuous Lagrange elements, and time is
//! advanced by a linearized backward Euler step that decouples the two
//! solves.

pub mod analysis;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod problem;
pub mod scheme;

pub use error::{Error, Result};
