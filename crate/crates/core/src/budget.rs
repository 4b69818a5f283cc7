//! Resource limits for operations whose cost grows geometrically with depth.

use crate::error::{Error, Result};

/// Environment variable consulted by [`Budget::from_env`] to override the segment limit.
pub const SEGMENT_BUDGET_ENV: &str = "MFDIM_SEGMENT_BUDGET";

pub const DEFAULT_MAX_SEGMENTS: u64 = 10_000_000;
pub const DEFAULT_MAX_RASTER_WORK: u64 = 1_000_000_000;
pub const DEFAULT_MAX_CENSUS_CONFIGS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest segment count a curve operation may materialize.
    pub max_segments: u64,
    /// Largest number of (row, segment) span evaluations per rasterization pass.
    pub max_raster_work: u64,
    /// Largest number of exponent configurations a census may hold.
    pub max_census_configs: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_segments: DEFAULT_MAX_SEGMENTS,
            max_raster_work: DEFAULT_MAX_RASTER_WORK,
            max_census_configs: DEFAULT_MAX_CENSUS_CONFIGS,
        }
    }
}

impl Budget {
    /// Default budget with `max_segments` taken from [`SEGMENT_BUDGET_ENV`] when set.
    pub fn from_env() -> Result<Self> {
        let mut budget = Budget::default();
        if let Ok(raw) = std::env::var(SEGMENT_BUDGET_ENV) {
            budget.max_segments = raw.trim().parse().map_err(|_| {
                Error::invalid(format!("{SEGMENT_BUDGET_ENV}={raw:?} is not an integer"))
            })?;
        }
        Ok(budget)
    }

    /// Checks that `base^exp` segments fit; returns the count.
    pub fn check_segments(&self, base: usize, exp: u32) -> Result<u64> {
        let requested = (base as u128).checked_pow(exp).unwrap_or(u128::MAX);
        if requested > self.max_segments as u128 {
            return Err(Error::Budget {
                what: "segments",
                requested,
                limit: self.max_segments as u128,
            });
        }
        Ok(requested as u64)
    }

    pub(crate) fn check_segment_count(&self, count: usize) -> Result<()> {
        if count as u64 > self.max_segments {
            return Err(Error::Budget {
                what: "segments",
                requested: count as u128,
                limit: self.max_segments as u128,
            });
        }
        Ok(())
    }
}
