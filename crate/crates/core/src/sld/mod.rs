//! Styled Layer Descriptor 1.0.0 document model, parser, writer and linter.
//!
//! Elements are matched by local name; namespace URIs are ignored.

mod parse;
mod validate;
mod write;

pub use parse::{decode_xml_bytes, MAX_FILTER_DEPTH, parse_sld, parse_sld_node, parse_sld_with_warnings, parse_user_style_file, SldError, Warning};
pub use validate::{validate_sld, Diagnostic, Schema};
pub use write::serialize_sld;

use crate::filter::FilterExpr;
use crate::model::Color;

#[derive(Debug, Clone, PartialEq)]
pub struct SldDocument {
    pub version: String,
    pub layers: Vec<NamedLayerDef>,
}

impl SldDocument {
    pub fn new(layers: Vec<NamedLayerDef>) -> Self {
        SldDocument {
            version: "1.0.0".to_string(),
            layers,
        }
    }

    /// All user styles declared under NamedLayers called `layer`.
    pub fn user_styles_for<'a>(&'a self, layer: &'a str) -> impl Iterator<Item = &'a UserStyle> + 'a {
        self.layers
            .iter()
            .filter(move |l| l.name == layer)
            .flat_map(|l| l.styles.iter())
            .filter_map(|s| match s {
                StyleDef::User(u) => Some(u),
                StyleDef::NamedStyleRef(_) => None,
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedLayerDef {
    pub name: String,
    pub styles: Vec<StyleDef>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StyleDef {
    /// `<NamedStyle><Name>…</Name></NamedStyle>`: a server-side style.
    NamedStyleRef(String),
    User(UserStyle),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct UserStyle {
    pub name: Option<String>,
    pub title: Option<String>,
    pub is_default: bool,
    pub feature_type_styles: Vec<FeatureTypeStyle>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureTypeStyle {
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Rule {
    pub name: Option<String>,
    pub filter: Option<FilterExpr>,
    pub symbolizers: Vec<Symbolizer>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Symbolizer {
    Line(LineSymbolizer),
    Text(TextSymbolizer),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSymbolizer {
    pub stroke: Color,
    pub stroke_width: f64,
}

impl Default for LineSymbolizer {
    fn default() -> Self {
        LineSymbolizer {
            stroke: Color::BLACK,
            stroke_width: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FontStyle {
    #[default]
    Normal,
    Italic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FontWeight {
    #[default]
    Normal,
    Bold,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FontSpec {
    pub family: String,
    pub size: f64,
    pub style: FontStyle,
    pub weight: FontWeight,
}

impl Default for FontSpec {
    fn default() -> Self {
        FontSpec {
            family: "Arial".to_string(),
            size: 10.0,
            style: FontStyle::Normal,
            weight: FontWeight::Normal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelPlacement {
    #[default]
    Point,
    Line,
}

/// GeoServer-style label vendor options. Distances are pixels, angles degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct VendorOptions {
    pub follow_line: bool,
    pub max_angle_delta: f64,
    pub max_displacement: f64,
    pub repeat: f64,
}

impl Default for VendorOptions {
    fn default() -> Self {
        VendorOptions {
            follow_line: false,
            max_angle_delta: 22.5,
            max_displacement: 0.0,
            repeat: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextSymbolizer {
    pub label_property: String,
    pub fill: Color,
    pub font: FontSpec,
    pub placement: LabelPlacement,
    pub vendor: VendorOptions,
}

impl TextSymbolizer {
    pub fn new(label_property: impl Into<String>) -> Self {
        TextSymbolizer {
            label_property: label_property.into(),
            fill: Color::BLACK,
            font: FontSpec::default(),
            placement: LabelPlacement::Point,
            vendor: VendorOptions::default(),
        }
    }
}
