pub mod checks;
pub mod config;
pub mod convolution;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod maximal;
pub mod multiplicity;
pub mod quadrature;
pub mod runner;
pub mod special;
pub mod summability;
pub mod testfn;
pub mod transform;
pub mod translation;

pub use error::{DunklError, Result};
