//! DEM ingestion, contour level computation, marching-squares tracing and
//! multicolor ramp style generation.

mod grid;
mod levels;
mod march;
mod ramp;

pub use grid::{parse_ascii_grid, parse_ascii_grid_str, DemGrid, GridError};
pub use levels::{classify_index, compute_levels, level_position, ContourSpec, LevelError, LEVEL_TOLERANCE};
pub use march::{extract_contours, level_perturbation, ELEVATION_ATTR, INDEX_ATTR};
pub use ramp::{format_level, generate_ramp_sld, generate_ramp_sld_for, LabelMode, RampError, DEFAULT_RAMP_LAYER};
