//! Self-similar fractal curves built by segment replacement, their expanded
//! unbounded counterparts, and the dimensions that describe them: Hausdorff
//! (Moran equation), Minkowski–Bouligand (sausage scaling) and Mendès France
//! (sausage area against convex-hull perimeter).
//!
//! Modules follow the pipeline: [`model`] parses and validates a generator
//! rule, [`curvegen`] materializes finite-step polygonals, [`geom`] measures
//! them, [`dims`] turns the measurements into dimensions and theorem checks,
//! and [`combin`] holds the exact segment-count combinatorics.

pub mod budget;
pub mod cli;
pub mod combin;
pub mod curvegen;
pub mod dims;
pub mod error;
pub mod geom;
pub mod model;
pub mod point;
pub mod rules;

pub use budget::Budget;
pub use curvegen::{LengthStats, Polyline};
pub use error::{Error, Result};
pub use model::{parse_rule, validate_rule, GeneratorRule, ValidationReport};
pub use point::Point;
