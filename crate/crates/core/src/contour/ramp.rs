use std::str::FromStr;

use thiserror::Error;

use crate::filter::FilterExpr;
use crate::model::Color;
use crate::sld::{
    FeatureTypeStyle, FontSpec, FontStyle, FontWeight, LabelPlacement, LineSymbolizer, NamedLayerDef, Rule,
    SldDocument, StyleDef, Symbolizer, TextSymbolizer, UserStyle, VendorOptions,
};

use super::levels::classify_index;
use super::march::ELEVATION_ATTR;

pub const DEFAULT_RAMP_LAYER: &str = "contours";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RampError {
    #[error("at least one contour level is required")]
    EmptyLevels,
    #[error("levels must be finite and strictly ascending")]
    UnsortedLevels,
    #[error("unknown label mode {0:?} (expected index-only or all)")]
    UnknownLabelMode(String),
}

/// Which contour rules get a TextSymbolizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelMode {
    #[default]
    IndexOnly,
    All,
}

impl FromStr for LabelMode {
    type Err = RampError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "index-only" | "index" => Ok(LabelMode::IndexOnly),
            "all" => Ok(LabelMode::All),
            _ => Err(RampError::UnknownLabelMode(s.to_string())),
        }
    }
}

/// Shortest decimal that round-trips, e.g. `450`, `12.5`.
pub fn format_level(level: f64) -> String {
    level.to_string()
}

fn contour_label() -> TextSymbolizer {
    TextSymbolizer {
        label_property: ELEVATION_ATTR.to_string(),
        fill: Color::BLACK,
        font: FontSpec {
            family: "Arial".to_string(),
            size: 8.0,
            style: FontStyle::Normal,
            weight: FontWeight::Bold,
        },
        placement: LabelPlacement::Line,
        vendor: VendorOptions {
            follow_line: true,
            max_angle_delta: 90.0,
            max_displacement: 400.0,
            repeat: 150.0,
        },
    }
}

pub fn generate_ramp_sld(
    levels: &[f64],
    ramp_start: Color,
    ramp_end: Color,
    label_mode: LabelMode,
) -> Result<SldDocument, RampError> {
    generate_ramp_sld_for(DEFAULT_RAMP_LAYER, levels, ramp_start, ramp_end, label_mode)
}

/// One rule per level: an ELEVATION equality filter, a stroke interpolated
/// along the ramp (width 2 on index contours, 1 otherwise) and, per
/// `label_mode`, an along-line elevation label. The style is marked as the
/// layer default.
pub fn generate_ramp_sld_for(
    layer_name: &str,
    levels: &[f64],
    ramp_start: Color,
    ramp_end: Color,
    label_mode: LabelMode,
) -> Result<SldDocument, RampError> {
    if levels.is_empty() {
        return Err(RampError::EmptyLevels);
    }
    if !levels.iter().all(|l| l.is_finite()) || levels.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(RampError::UnsortedLevels);
    }
    let n = levels.len();
    let rules = levels
        .iter()
        .enumerate()
        .map(|(pos, &level)| {
            let t = if n == 1 { 0.0 } else { pos as f64 / (n - 1) as f64 };
            let index = classify_index(levels, level).unwrap_or(false);
            let label = format_level(level);
            let mut symbolizers = vec![Symbolizer::Line(LineSymbolizer {
                stroke: ramp_start.lerp(ramp_end, t),
                stroke_width: if index { 2.0 } else { 1.0 },
            })];
            if index || label_mode == LabelMode::All {
                symbolizers.push(Symbolizer::Text(contour_label()));
            }
            Rule {
                name: Some(label.clone()),
                filter: Some(FilterExpr::equal_to(ELEVATION_ATTR, label)),
                symbolizers,
            }
        })
        .collect();
    Ok(SldDocument::new(vec![NamedLayerDef {
        name: layer_name.to_string(),
        styles: vec![StyleDef::User(UserStyle {
            name: Some("contour_ramp".to_string()),
            title: Some("Multicolor elevation contours".to_string()),
            is_default: true,
            feature_type_styles: vec![FeatureTypeStyle { rules }],
        })],
    }]))
}
