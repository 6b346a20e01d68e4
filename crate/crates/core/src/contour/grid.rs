use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::BoundingBox;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("cannot read grid {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("expected {expected} cell values, found {found}")]
    DataShapeMismatch { expected: usize, found: usize },
    #[error("non-numeric cell value {value:?} at data row {row}")]
    NonNumericCell { row: usize, value: String },
    #[error("invalid grid: {0}")]
    Invalid(String),
}

/// Georeferenced elevation raster. `values` is row-major with row 0 the
/// northernmost row; node `(col, row)` sits at
/// `(xll + col * cellsize, yll + (nrows - 1 - row) * cellsize)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DemGrid {
    pub ncols: usize,
    pub nrows: usize,
    pub xll: f64,
    pub yll: f64,
    pub cellsize: f64,
    pub nodata: f64,
    pub values: Vec<f64>,
}

impl DemGrid {
    pub fn new(
        ncols: usize,
        nrows: usize,
        xll: f64,
        yll: f64,
        cellsize: f64,
        nodata: f64,
        values: Vec<f64>,
    ) -> Result<Self, GridError> {
        if ncols == 0 || nrows == 0 {
            return Err(GridError::Invalid("ncols and nrows must be positive".into()));
        }
        if !(cellsize > 0.0) || !cellsize.is_finite() {
            return Err(GridError::Invalid(format!("cellsize must be positive, got {cellsize}")));
        }
        if !xll.is_finite() || !yll.is_finite() {
            return Err(GridError::Invalid("corner coordinates must be finite".into()));
        }
        let expected = ncols.checked_mul(nrows).ok_or_else(|| GridError::Invalid("grid too large".into()))?;
        if values.len() != expected {
            return Err(GridError::DataShapeMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(DemGrid {
            ncols,
            nrows,
            xll,
            yll,
            cellsize,
            nodata,
            values,
        })
    }

    #[inline]
    pub fn value(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.ncols + col]
    }

    pub fn is_nodata(&self, v: f64) -> bool {
        v == self.nodata || v.is_nan()
    }

    pub fn node_x(&self, col: f64) -> f64 {
        self.xll + col * self.cellsize
    }

    pub fn node_y(&self, row: f64) -> f64 {
        self.yll + (self.nrows as f64 - 1.0 - row) * self.cellsize
    }

    /// Min and max over valid (non-nodata) nodes.
    pub fn value_range(&self) -> Option<(f64, f64)> {
        self.values
            .iter()
            .copied()
            .filter(|v| !self.is_nodata(*v))
            .fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }

    /// World extent spanned by the grid nodes.
    pub fn extent(&self) -> Option<BoundingBox> {
        BoundingBox::new(
            self.xll,
            self.yll,
            self.node_x((self.ncols - 1) as f64),
            self.node_y(0.0),
        )
        .ok()
    }
}

const HEADER_KEYS: [&str; 6] = ["ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"];

pub fn parse_ascii_grid(path: impl AsRef<Path>) -> Result<DemGrid, GridError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| GridError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ascii_grid_str(&text)
}

/// Parses ESRI ASCII grid text. Header keys are case-insensitive and may come
/// in any order; the first line that starts with a number begins the data.
pub fn parse_ascii_grid_str(text: &str) -> Result<DemGrid, GridError> {
    let mut header: [Option<f64>; 6] = [None; 6];
    let mut lines = text.lines().enumerate().peekable();

    while let Some(&(_, line)) = lines.peek() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            lines.next();
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let key = parts.next().unwrap_or_default();
        if key.parse::<f64>().is_ok() {
            break;
        }
        let lower = key.to_ascii_lowercase();
        let slot = HEADER_KEYS
            .iter()
            .position(|k| *k == lower)
            .ok_or_else(|| GridError::MalformedHeader(format!("unknown key {key:?}")))?;
        if header[slot].is_some() {
            return Err(GridError::MalformedHeader(format!("duplicate key {key:?}")));
        }
        let value = parts
            .next()
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| GridError::MalformedHeader(format!("key {key:?} needs a numeric value")))?;
        if parts.next().is_some() {
            return Err(GridError::MalformedHeader(format!("trailing tokens after {key:?}")));
        }
        header[slot] = Some(value);
        lines.next();
    }

    let required = |i: usize| header[i].ok_or_else(|| GridError::MalformedHeader(format!("missing {}", HEADER_KEYS[i])));
    let count = |i: usize| -> Result<usize, GridError> {
        let v = required(i)?;
        if v < 1.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
            return Err(GridError::MalformedHeader(format!("{} must be a positive integer", HEADER_KEYS[i])));
        }
        Ok(v as usize)
    };
    let ncols = count(0)?;
    let nrows = count(1)?;
    let xll = required(2)?;
    let yll = required(3)?;
    let cellsize = required(4)?;
    let nodata = header[5].unwrap_or(-9999.0);

    let expected = ncols.saturating_mul(nrows);
    let mut values = Vec::with_capacity(expected.min(1 << 24));
    for (row, (_, line)) in lines.enumerate() {
        for token in line.split_whitespace() {
            let v = token.parse::<f64>().map_err(|_| GridError::NonNumericCell {
                row,
                value: token.to_string(),
            })?;
            values.push(v);
        }
    }
    if values.len() != expected {
        return Err(GridError::DataShapeMismatch {
            expected,
            found: values.len(),
        });
    }
    DemGrid::new(ncols, nrows, xll, yll, cellsize, nodata, values)
}
