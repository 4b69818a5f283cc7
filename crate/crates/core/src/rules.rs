//! Bundled rule documents.

pub const KOCH: &str = include_str!("../rules/koch.rule");
pub const MIXED_345: &str = include_str!("../rules/mixed345.rule");
pub const STRAIGHT: &str = include_str!("../rules/straight.rule");
/// Self-crossing generator, rejected by validation at depth 1.
pub const CROSSING: &str = include_str!("../rules/crossing.rule");
