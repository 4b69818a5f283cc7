//! Finite-step polygonal curves: contractive iterates `p_k`, expanded iterates
//! `p'_k`, and the spirals used to calibrate the dimension estimators.

mod iterate;
mod polyline;
mod spiral;

pub(crate) use iterate::ratio_at;
pub use iterate::{
    contract_iterate, contract_iterate_labeled, expand_iterate, expansion_factor, LabeledIterate,
};
pub use polyline::{length_stats, LengthStats, Polyline, SvgOptions};
pub use spiral::{
    archimedean_angle_for_length, archimedean_arc_length, archimedean_spiral,
    logarithmic_arc_length, logarithmic_spiral,
};
