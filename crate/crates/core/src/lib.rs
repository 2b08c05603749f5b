pub mod error;
pub mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub mod geometry;
pub mod weight;
pub mod regularize;
pub mod predict;
pub mod spectrum;
pub mod fit;
pub mod symbols;
pub mod checks;
