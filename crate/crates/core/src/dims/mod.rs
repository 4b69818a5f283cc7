//! Closed-form and numeric dimensions of generated curves.

pub mod closed;
pub mod estimate;
pub mod theorem;

pub use closed::{
    hausdorff_dimension, is_resolvable, mf_dimension_resolvable, moran_gap, moran_residual,
    theorem2_lower_bound, MORAN_TOL,
};
pub use estimate::{
    default_fit_window, least_squares_slope, mf_dimension_estimate, mf_dimension_estimate_spiral,
    minkowski_dimension_estimate, DimensionEstimate, EstimateConfig, MinkowskiEstimate, Sample,
    ScaleSample,
};
pub use theorem::{
    verify_theorem1, verify_theorem2, verify_theorems, TheoremReport, Verdict, VerifyConfig,
};
