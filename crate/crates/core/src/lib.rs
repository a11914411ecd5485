//! Random associative and/or trees: exact counting, exact distributions over Boolean
//! functions, singularity analysis of limiting ratios, uniform sampling and tree-size
//! complexity.

pub mod analytic;
pub mod cli;
pub mod complexity;
pub mod counting;
pub mod error;
pub mod exact_dist;
pub mod formula;
pub mod sampler;
pub mod verify;

pub use error::{Error, Result};
