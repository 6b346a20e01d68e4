use xmlwriter::{Options, XmlWriter};

use crate::filter::FilterExpr;
use crate::model::Color;
use crate::xml::inline_text;

use super::{
    FeatureTypeStyle, FontSpec, FontStyle, FontWeight, LabelPlacement, LineSymbolizer, NamedLayerDef, Rule,
    SldDocument, StyleDef, Symbolizer, TextSymbolizer, UserStyle, VendorOptions,
};

const SLD_NS: &str = "http://www.opengis.net/sld";
const OGC_NS: &str = "http://www.opengis.net/ogc";

/// Writes `doc` as SLD 1.0.0 XML. Parameters equal to their defaults are
/// left out, so `parse_sld(&serialize_sld(d)) == d`.
pub fn serialize_sld(doc: &SldDocument) -> String {
    let mut w = XmlWriter::new(Options::default());
    w.write_declaration();
    w.start_element("StyledLayerDescriptor");
    w.write_attribute("version", &doc.version.replace('&', "&amp;").replace('<', "&lt;"));
    w.write_attribute("xmlns", SLD_NS);
    w.write_attribute("xmlns:ogc", OGC_NS);
    for layer in &doc.layers {
        named_layer(&mut w, layer);
    }
    let mut out = w.end_document();
    out.push('\n');
    out
}

fn text_element(w: &mut XmlWriter, name: &str, text: &str) {
    w.start_element(name);
    inline_text(w, text);
}

fn css(w: &mut XmlWriter, tag: &str, name: &str, value: &str) {
    w.start_element(tag);
    w.write_attribute("name", name);
    inline_text(w, value);
}

fn named_layer(w: &mut XmlWriter, layer: &NamedLayerDef) {
    w.start_element("NamedLayer");
    text_element(w, "Name", &layer.name);
    for style in &layer.styles {
        match style {
            StyleDef::NamedStyleRef(name) => {
                w.start_element("NamedStyle");
                text_element(w, "Name", name);
                w.end_element();
            }
            StyleDef::User(u) => user_style(w, u),
        }
    }
    w.end_element();
}

fn user_style(w: &mut XmlWriter, style: &UserStyle) {
    w.start_element("UserStyle");
    if let Some(name) = &style.name {
        text_element(w, "Name", name);
    }
    if let Some(title) = &style.title {
        text_element(w, "Title", title);
    }
    if style.is_default {
        text_element(w, "IsDefault", "1");
    }
    for fts in &style.feature_type_styles {
        feature_type_style(w, fts);
    }
    w.end_element();
}

fn feature_type_style(w: &mut XmlWriter, fts: &FeatureTypeStyle) {
    w.start_element("FeatureTypeStyle");
    for r in &fts.rules {
        rule(w, r);
    }
    w.end_element();
}

fn rule(w: &mut XmlWriter, rule: &Rule) {
    w.start_element("Rule");
    if let Some(name) = &rule.name {
        text_element(w, "Name", name);
    }
    if let Some(filter) = &rule.filter {
        w.start_element("ogc:Filter");
        filter_expr(w, filter);
        w.end_element();
    }
    for sym in &rule.symbolizers {
        match sym {
            Symbolizer::Line(l) => line_symbolizer(w, l),
            Symbolizer::Text(t) => text_symbolizer(w, t),
        }
    }
    w.end_element();
}

fn comparison(w: &mut XmlWriter, op: &str, property: &str, literal: &str) {
    w.start_element(op);
    text_element(w, "ogc:PropertyName", property);
    text_element(w, "ogc:Literal", literal);
    w.end_element();
}

fn filter_expr(w: &mut XmlWriter, expr: &FilterExpr) {
    match expr {
        FilterExpr::IsEqualTo { property, literal } => comparison(w, "ogc:PropertyIsEqualTo", property, literal),
        FilterExpr::IsNotEqualTo { property, literal } => {
            comparison(w, "ogc:PropertyIsNotEqualTo", property, literal)
        }
        FilterExpr::IsLessThan { property, literal } => comparison(w, "ogc:PropertyIsLessThan", property, literal),
        FilterExpr::IsGreaterThan { property, literal } => {
            comparison(w, "ogc:PropertyIsGreaterThan", property, literal)
        }
        FilterExpr::IsBetween { property, low, high } => {
            w.start_element("ogc:PropertyIsBetween");
            text_element(w, "ogc:PropertyName", property);
            w.start_element("ogc:LowerBoundary");
            text_element(w, "ogc:Literal", low);
            w.end_element();
            w.start_element("ogc:UpperBoundary");
            text_element(w, "ogc:Literal", high);
            w.end_element();
            w.end_element();
        }
        FilterExpr::And(children) | FilterExpr::Or(children) => {
            w.start_element(if matches!(expr, FilterExpr::And(_)) { "ogc:And" } else { "ogc:Or" });
            children.iter().for_each(|c| filter_expr(w, c));
            w.end_element();
        }
        FilterExpr::Not(inner) => {
            w.start_element("ogc:Not");
            filter_expr(w, inner);
            w.end_element();
        }
    }
}

fn line_symbolizer(w: &mut XmlWriter, sym: &LineSymbolizer) {
    let defaults = LineSymbolizer::default();
    w.start_element("LineSymbolizer");
    if sym.stroke != defaults.stroke || sym.stroke_width != defaults.stroke_width {
        w.start_element("Stroke");
        if sym.stroke != defaults.stroke {
            css(w, "CssParameter", "stroke", &sym.stroke.to_string());
        }
        if sym.stroke_width != defaults.stroke_width {
            css(w, "CssParameter", "stroke-width", &sym.stroke_width.to_string());
        }
        w.end_element();
    }
    w.end_element();
}

fn text_symbolizer(w: &mut XmlWriter, sym: &TextSymbolizer) {
    w.start_element("TextSymbolizer");
    w.start_element("Label");
    text_element(w, "ogc:PropertyName", &sym.label_property);
    w.end_element();
    if sym.fill != Color::BLACK {
        w.start_element("Fill");
        css(w, "CssParameter", "fill", &sym.fill.to_string());
        w.end_element();
    }
    font(w, &sym.font);
    vendor_options(w, &sym.vendor);
    if sym.placement == LabelPlacement::Line {
        w.start_element("LabelPlacement");
        w.start_element("LinePlacement");
        w.end_element();
        w.end_element();
    }
    w.end_element();
}

fn font(w: &mut XmlWriter, font: &FontSpec) {
    let d = FontSpec::default();
    if *font == d {
        return;
    }
    w.start_element("Font");
    if font.family != d.family {
        css(w, "CssParameter", "font-family", &font.family);
    }
    if font.size != d.size {
        css(w, "CssParameter", "font-size", &font.size.to_string());
    }
    if font.style != d.style {
        let v = match font.style {
            FontStyle::Normal => "normal",
            FontStyle::Italic => "italic",
        };
        css(w, "CssParameter", "font-style", v);
    }
    if font.weight != d.weight {
        let v = match font.weight {
            FontWeight::Normal => "normal",
            FontWeight::Bold => "bold",
        };
        css(w, "CssParameter", "font-weight", v);
    }
    w.end_element();
}

fn vendor_options(w: &mut XmlWriter, v: &VendorOptions) {
    let d = VendorOptions::default();
    if v.follow_line != d.follow_line {
        css(w, "VendorOption", "followLine", &v.follow_line.to_string());
    }
    if v.max_angle_delta != d.max_angle_delta {
        css(w, "VendorOption", "maxAngleDelta", &v.max_angle_delta.to_string());
    }
    if v.max_displacement != d.max_displacement {
        css(w, "VendorOption", "maxDisplacement", &v.max_displacement.to_string());
    }
    if v.repeat != d.repeat {
        css(w, "VendorOption", "repeat", &v.repeat.to_string());
    }
}
