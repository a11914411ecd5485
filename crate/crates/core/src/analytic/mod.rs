//! Exact singularity analysis and limiting ratios of tree families.

pub mod catalog;
pub mod engine;
pub mod expr;
pub mod hifloat;
pub mod quad;
pub mod scalar;

pub use catalog::FamilyExpr;
pub use engine::{
    coefficient_ratio, expected_first_level_leaves, limiting_ratio, limiting_ratio_with, singularity, tautology_bounds,
    tautology_bounds_limit, tautology_bounds_with, Env, Precision, RatioValue, SingularData, TautologyBounds,
};
pub use hifloat::HiFloat;
pub use quad::QuadExt;
