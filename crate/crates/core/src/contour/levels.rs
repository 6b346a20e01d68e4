use thiserror::Error;

/// Float drift allowance when matching levels to multiples of the interval.
pub const LEVEL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevelError {
    #[error("contour interval must be positive and finite, got {0}")]
    InvalidInterval(f64),
    #[error("level {0} is not in the level list")]
    LevelNotFound(f64),
}

/// Base contour plus vertical spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    base: f64,
    interval: f64,
}

impl ContourSpec {
    pub fn new(base: f64, interval: f64) -> Result<Self, LevelError> {
        if !(interval > 0.0) || !interval.is_finite() || !base.is_finite() {
            return Err(LevelError::InvalidInterval(interval));
        }
        Ok(ContourSpec { base, interval })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }
}

/// Every `base + k * interval` (any integer `k`) inside `[min_elev, max_elev]`,
/// ascending.
pub fn compute_levels(min_elev: f64, max_elev: f64, spec: ContourSpec) -> Vec<f64> {
    if !(min_elev <= max_elev) {
        return Vec::new();
    }
    let ContourSpec { base, interval } = spec;
    let k_lo = ((min_elev - base) / interval - LEVEL_TOLERANCE).ceil();
    let k_hi = ((max_elev - base) / interval + LEVEL_TOLERANCE).floor();
    if !(k_lo <= k_hi) {
        return Vec::new();
    }
    let (k_lo, k_hi) = (k_lo as i64, k_hi as i64);
    (k_lo..=k_hi).map(|k| base + k as f64 * interval).collect()
}

/// Position of `level` in `levels_sorted`, tolerating float drift.
pub fn level_position(levels_sorted: &[f64], level: f64) -> Option<usize> {
    levels_sorted
        .iter()
        .position(|l| (l - level).abs() <= LEVEL_TOLERANCE * l.abs().max(1.0))
}

/// Every fifth level, counted by position from the lowest, is an index contour.
pub fn classify_index(levels_sorted: &[f64], level: f64) -> Result<bool, LevelError> {
    level_position(levels_sorted, level)
        .map(|pos| pos % 5 == 0)
        .ok_or(LevelError::LevelNotFound(level))
}
