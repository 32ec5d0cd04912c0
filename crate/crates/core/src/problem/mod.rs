//! Model coefficients, automatic differentiation and manufactured solutions.

pub mod coefficients;
pub mod hyperdual;
pub mod manufactured;

pub use coefficients::Coefficients;
pub use hyperdual::{hyperdual_eval, Jet1, Jet2, Scalar};
pub use manufactured::{Example, ManufacturedCase};
