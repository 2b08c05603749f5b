//! Special functions and quadrature rules used across the crate.

pub mod bessel;
pub mod gamma;
pub mod legendre;
pub mod quadrature;

pub use gamma::{gamma, gamma_real, rgamma, EULER_GAMMA};
