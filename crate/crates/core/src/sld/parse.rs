use roxmltree::{Document, Node};
use thiserror::Error;

use crate::filter::FilterExpr;
use crate::model::Color;
use crate::xml::{nesting_exceeds, MAX_XML_DEPTH};

use super::{
    FeatureTypeStyle, FontSpec, FontStyle, FontWeight, LabelPlacement, LineSymbolizer, NamedLayerDef, Rule,
    SldDocument, StyleDef, Symbolizer, TextSymbolizer, UserStyle, VendorOptions,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SldError {
    #[error("XML syntax error at {line}:{column}: {message}")]
    XmlSyntaxError { line: u32, column: u32, message: String },
    #[error("unsupported text encoding {0:?}")]
    Encoding(String),
    #[error("expected root element <{expected}>, found <{found}>")]
    UnexpectedRoot { expected: &'static str, found: String },
    #[error("<{0}> has no <Name>")]
    MissingName(&'static str),
    #[error("invalid color {value:?} for {param}")]
    InvalidColor { param: String, value: String },
    #[error("invalid number {value:?} for {param}")]
    InvalidNumber { param: String, value: String },
    #[error("invalid value {value:?} for {param}")]
    InvalidValue { param: String, value: String },
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("<{0}> must not be empty")]
    EmptyElement(&'static str),
}

/// A non-fatal parse note (skipped element, unsupported version).
#[derive(Debug, Clone, PartialEq)]
pub struct Warning {
    pub path: String,
    pub message: String,
}

type Result<T> = std::result::Result<T, SldError>;

/// Decodes XML bytes honouring an ISO-8859-1 declaration; everything else is
/// read as UTF-8.
pub fn decode_xml_bytes(bytes: &[u8]) -> Result<String> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    if declared_encoding(bytes).is_some_and(|e| is_latin1(&e)) {
        return Ok(bytes.iter().map(|&b| b as char).collect());
    }
    match std::str::from_utf8(bytes) {
        Ok(s) => Ok(s.to_string()),
        Err(_) => Err(SldError::Encoding(
            declared_encoding(bytes).unwrap_or_else(|| "UTF-8 (invalid bytes)".into()),
        )),
    }
}

fn is_latin1(name: &str) -> bool {
    matches!(
        name.to_ascii_lowercase().as_str(),
        "iso-8859-1" | "iso8859-1" | "latin1" | "latin-1" | "l1" | "iso_8859-1"
    )
}

fn declared_encoding(bytes: &[u8]) -> Option<String> {
    let head = bytes.strip_prefix(b"<?xml")?;
    let end = head.windows(2).position(|w| w == b"?>")?;
    let decl = std::str::from_utf8(&head[..end]).ok()?;
    let at = decl.find("encoding")?;
    let rest = decl[at + "encoding".len()..].trim_start().strip_prefix('=')?.trim_start();
    let quote = rest.chars().next().filter(|c| *c == '"' || *c == '\'')?;
    let value = &rest[1..];
    Some(value[..value.find(quote)?].to_string())
}

pub(crate) fn parse_document(xml: &str) -> Result<Document<'_>> {
    if nesting_exceeds(xml, MAX_XML_DEPTH) {
        return Err(SldError::XmlSyntaxError {
            line: 1,
            column: 1,
            message: format!("elements nested deeper than {MAX_XML_DEPTH}"),
        });
    }
    Document::parse(xml).map_err(|e| {
        let pos = e.pos();
        SldError::XmlSyntaxError {
            line: pos.row,
            column: pos.col,
            message: e.to_string(),
        }
    })
}

pub fn parse_sld(xml: &str) -> Result<SldDocument> {
    parse_sld_with_warnings(xml).map(|(doc, _)| doc)
}

pub fn parse_sld_with_warnings(xml: &str) -> Result<(SldDocument, Vec<Warning>)> {
    let doc = parse_document(xml)?;
    let mut warnings = Vec::new();
    let sld = parse_sld_node(doc.root_element(), &mut warnings)?;
    Ok((sld, warnings))
}

/// Parses a style fragment file: either a bare `<UserStyle>` or an SLD
/// document whose first user style is taken.
pub fn parse_user_style_file(xml: &str) -> Result<UserStyle> {
    let doc = parse_document(xml)?;
    let root = doc.root_element();
    let mut p = Parser::default();
    match root.tag_name().name() {
        "UserStyle" => p.user_style(root),
        "StyledLayerDescriptor" => {
            let sld = p.document(root)?;
            sld.layers
                .into_iter()
                .flat_map(|l| l.styles)
                .find_map(|s| match s {
                    StyleDef::User(u) => Some(u),
                    StyleDef::NamedStyleRef(_) => None,
                })
                .ok_or(SldError::EmptyElement("UserStyle"))
        }
        other => Err(SldError::UnexpectedRoot {
            expected: "UserStyle",
            found: other.to_string(),
        }),
    }
}

/// Parses an already-located `<StyledLayerDescriptor>` element.
pub fn parse_sld_node(node: Node<'_, '_>, warnings: &mut Vec<Warning>) -> Result<SldDocument> {
    let name = node.tag_name().name();
    if name != "StyledLayerDescriptor" {
        return Err(SldError::UnexpectedRoot {
            expected: "StyledLayerDescriptor",
            found: name.to_string(),
        });
    }
    let mut p = Parser::default();
    let doc = p.document(node)?;
    warnings.append(&mut p.warnings);
    Ok(doc)
}

fn elements<'a, 'input>(node: Node<'a, 'input>) -> impl Iterator<Item = Node<'a, 'input>> {
    node.children().filter(Node::is_element)
}

fn local<'a>(node: &Node<'a, '_>) -> &'a str {
    node.tag_name().name()
}

fn text_content(node: Node<'_, '_>) -> String {
    node.descendants()
        .filter(Node::is_text)
        .filter_map(|n| n.text())
        .collect::<String>()
        .trim()
        .to_string()
}

fn parse_number(param: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| SldError::InvalidNumber {
            param: param.to_string(),
            value: value.to_string(),
        })
}

fn parse_bool(param: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(SldError::InvalidValue {
            param: param.to_string(),
            value: value.to_string(),
        }),
    }
}

fn parse_color(param: &str, value: &str) -> Result<Color> {
    value.trim().parse().map_err(|_| SldError::InvalidColor {
        param: param.to_string(),
        value: value.to_string(),
    })
}

fn check_range(param: &str, value: f64, ok: bool) -> Result<f64> {
    if ok {
        Ok(value)
    } else {
        Err(SldError::InvalidNumber {
            param: param.to_string(),
            value: value.to_string(),
        })
    }
}

/// `(name attribute, text, node)` of each `CssParameter`/`SvgParameter` child.
fn css_parameters<'a, 'input>(node: Node<'a, 'input>) -> Vec<(String, String, Node<'a, 'input>)> {
    elements(node)
        .filter(|n| matches!(local(n), "CssParameter" | "SvgParameter"))
        .map(|n| (n.attribute("name").unwrap_or_default().to_string(), text_content(n), n))
        .collect()
}

#[derive(Default)]
struct Parser {
    warnings: Vec<Warning>,
}

impl Parser {
    fn warn(&mut self, node: &Node<'_, '_>, message: impl Into<String>) {
        let mut path: Vec<&str> = node.ancestors().filter(Node::is_element).map(|n| local(&n)).collect();
        path.reverse();
        self.warnings.push(Warning {
            path: path.join("/"),
            message: message.into(),
        });
    }

    fn skip(&mut self, node: &Node<'_, '_>) {
        self.warn(node, format!("skipped unsupported element <{}>", local(node)));
    }

    fn document(&mut self, node: Node<'_, '_>) -> Result<SldDocument> {
        let version = match node.attribute("version") {
            Some(v) => v.to_string(),
            None => {
                self.warn(&node, "missing version attribute, assuming 1.0.0");
                "1.0.0".to_string()
            }
        };
        if version != "1.0.0" {
            self.warn(&node, format!("version {version} is not 1.0.0; parsing as 1.0.0"));
        }
        let mut layers = Vec::new();
        for child in elements(node) {
            match local(&child) {
                "NamedLayer" => layers.push(self.named_layer(child)?),
                "Name" | "Title" | "Abstract" => {}
                _ => self.skip(&child),
            }
        }
        if layers.is_empty() {
            self.warn(&node, "document defines no layers");
        }
        Ok(SldDocument { version, layers })
    }

    fn name_of(&mut self, node: Node<'_, '_>) -> Option<String> {
        elements(node)
            .find(|n| local(n) == "Name")
            .map(text_content)
            .filter(|s| !s.is_empty())
    }

    fn named_layer(&mut self, node: Node<'_, '_>) -> Result<NamedLayerDef> {
        let name = self.name_of(node).ok_or(SldError::MissingName("NamedLayer"))?;
        let mut styles = Vec::new();
        for child in elements(node) {
            match local(&child) {
                "Name" => {}
                "NamedStyle" => {
                    let style = self.name_of(child).ok_or(SldError::MissingName("NamedStyle"))?;
                    styles.push(StyleDef::NamedStyleRef(style));
                }
                "UserStyle" => styles.push(StyleDef::User(self.user_style(child)?)),
                _ => self.skip(&child),
            }
        }
        Ok(NamedLayerDef { name, styles })
    }

    fn user_style(&mut self, node: Node<'_, '_>) -> Result<UserStyle> {
        let mut style = UserStyle::default();
        for child in elements(node) {
            match local(&child) {
                "Name" => style.name = Some(text_content(child)).filter(|s| !s.is_empty()),
                "Title" => style.title = Some(text_content(child)),
                "Abstract" => {}
                "IsDefault" => style.is_default = parse_bool("IsDefault", &text_content(child))?,
                "FeatureTypeStyle" => style.feature_type_styles.push(self.feature_type_style(child)?),
                _ => self.skip(&child),
            }
        }
        Ok(style)
    }

    fn feature_type_style(&mut self, node: Node<'_, '_>) -> Result<FeatureTypeStyle> {
        let mut fts = FeatureTypeStyle::default();
        for child in elements(node) {
            match local(&child) {
                "Rule" => fts.rules.push(self.rule(child)?),
                "Name" | "Title" | "Abstract" => {}
                _ => self.skip(&child),
            }
        }
        Ok(fts)
    }

    fn rule(&mut self, node: Node<'_, '_>) -> Result<Rule> {
        let mut rule = Rule::default();
        for child in elements(node) {
            match local(&child) {
                "Name" => rule.name = Some(text_content(child)).filter(|s| !s.is_empty()),
                "Title" | "Abstract" => {}
                "Filter" => rule.filter = Some(filter_root(child)?),
                "LineSymbolizer" => rule.symbolizers.push(Symbolizer::Line(self.line_symbolizer(child)?)),
                "TextSymbolizer" => rule.symbolizers.push(Symbolizer::Text(self.text_symbolizer(child)?)),
                _ => self.skip(&child),
            }
        }
        Ok(rule)
    }

    fn line_symbolizer(&mut self, node: Node<'_, '_>) -> Result<LineSymbolizer> {
        let mut sym = LineSymbolizer::default();
        for child in elements(node) {
            match local(&child) {
                "Stroke" => {
                    for (name, value, param) in css_parameters(child) {
                        match name.as_str() {
                            "stroke" => sym.stroke = parse_color(&name, &value)?,
                            "stroke-width" => {
                                let w = parse_number(&name, &value)?;
                                sym.stroke_width = check_range(&name, w, w > 0.0)?;
                            }
                            _ => self.warn(&param, format!("ignored stroke parameter {name:?}")),
                        }
                    }
                    for other in elements(child).filter(|n| !matches!(local(n), "CssParameter" | "SvgParameter")) {
                        self.skip(&other);
                    }
                }
                _ => self.skip(&child),
            }
        }
        Ok(sym)
    }

    fn text_symbolizer(&mut self, node: Node<'_, '_>) -> Result<TextSymbolizer> {
        let mut label = None;
        let mut sym = TextSymbolizer::new("");
        for child in elements(node) {
            match local(&child) {
                "Label" => {
                    label = elements(child)
                        .find(|n| local(n) == "PropertyName")
                        .map(text_content)
                        .filter(|s| !s.is_empty());
                }
                "Fill" => {
                    for (name, value, param) in css_parameters(child) {
                        match name.as_str() {
                            "fill" => sym.fill = parse_color(&name, &value)?,
                            _ => self.warn(&param, format!("ignored fill parameter {name:?}")),
                        }
                    }
                }
                "Font" => sym.font = self.font(child)?,
                "LabelPlacement" => sym.placement = self.placement(child),
                "VendorOption" => self.vendor_option(child, &mut sym.vendor)?,
                _ => self.skip(&child),
            }
        }
        sym.label_property = label.ok_or(SldError::EmptyElement("Label"))?;
        Ok(sym)
    }

    fn font(&mut self, node: Node<'_, '_>) -> Result<FontSpec> {
        let mut font = FontSpec::default();
        for (name, value, param) in css_parameters(node) {
            match name.as_str() {
                "font-family" => font.family = value,
                "font-size" => {
                    let size = parse_number(&name, &value)?;
                    font.size = check_range(&name, size, size > 0.0)?;
                }
                "font-style" => {
                    font.style = match value.to_ascii_lowercase().as_str() {
                        "normal" => FontStyle::Normal,
                        "italic" | "oblique" => FontStyle::Italic,
                        _ => return Err(SldError::InvalidValue { param: name, value }),
                    }
                }
                "font-weight" => {
                    font.weight = match value.to_ascii_lowercase().as_str() {
                        "normal" => FontWeight::Normal,
                        "bold" => FontWeight::Bold,
                        _ => return Err(SldError::InvalidValue { param: name, value }),
                    }
                }
                _ => self.warn(&param, format!("ignored font parameter {name:?}")),
            }
        }
        Ok(font)
    }

    fn placement(&mut self, node: Node<'_, '_>) -> LabelPlacement {
        let mut placement = LabelPlacement::Point;
        for child in elements(node) {
            match local(&child) {
                "LinePlacement" => placement = LabelPlacement::Line,
                "PointPlacement" => placement = LabelPlacement::Point,
                _ => self.skip(&child),
            }
        }
        placement
    }

    fn vendor_option(&mut self, node: Node<'_, '_>, opts: &mut VendorOptions) -> Result<()> {
        let name = node.attribute("name").unwrap_or_default();
        let value = text_content(node);
        match name {
            "followLine" => opts.follow_line = parse_bool(name, &value)?,
            "maxAngleDelta" => {
                let v = parse_number(name, &value)?;
                opts.max_angle_delta = check_range(name, v, (0.0..=180.0).contains(&v))?;
            }
            "maxDisplacement" => {
                let v = parse_number(name, &value)?;
                opts.max_displacement = check_range(name, v, v >= 0.0)?;
            }
            "repeat" => {
                let v = parse_number(name, &value)?;
                opts.repeat = check_range(name, v, v >= 0.0)?;
            }
            _ => self.warn(&node, format!("ignored vendor option {name:?}")),
        }
        Ok(())
    }
}

fn filter_root(node: Node<'_, '_>) -> Result<FilterExpr> {
    let mut ops = elements(node);
    let op = ops
        .next()
        .ok_or_else(|| SldError::InvalidFilter("empty <Filter>".into()))?;
    if ops.next().is_some() {
        return Err(SldError::InvalidFilter("<Filter> must hold exactly one operator".into()));
    }
    filter_expr(op, 1)
}

fn property_name(node: Node<'_, '_>) -> Result<String> {
    elements(node)
        .find(|n| local(n) == "PropertyName")
        .map(text_content)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| SldError::InvalidFilter(format!("<{}> needs a non-empty PropertyName", local(&node))))
}

fn literal_in(node: Node<'_, '_>) -> Result<String> {
    elements(node)
        .find(|n| local(n) == "Literal")
        .map(text_content)
        .ok_or_else(|| SldError::InvalidFilter(format!("<{}> needs a Literal", local(&node))))
}

/// Deeper And/Or/Not nesting is rejected rather than risk the stack.
pub const MAX_FILTER_DEPTH: usize = 64;

fn filter_expr(node: Node<'_, '_>, depth: usize) -> Result<FilterExpr> {
    if depth > MAX_FILTER_DEPTH {
        return Err(SldError::InvalidFilter(format!("filter nesting exceeds {MAX_FILTER_DEPTH} levels")));
    }
    let name = local(&node);
    let expr = match name {
        "PropertyIsEqualTo" | "PropertyIsNotEqualTo" | "PropertyIsLessThan" | "PropertyIsGreaterThan" => {
            let property = property_name(node)?;
            let literal = literal_in(node)?;
            match name {
                "PropertyIsEqualTo" => FilterExpr::IsEqualTo { property, literal },
                "PropertyIsNotEqualTo" => FilterExpr::IsNotEqualTo { property, literal },
                "PropertyIsLessThan" => FilterExpr::IsLessThan { property, literal },
                _ => FilterExpr::IsGreaterThan { property, literal },
            }
        }
        "PropertyIsBetween" => {
            let property = property_name(node)?;
            let bound = |which: &str| {
                elements(node)
                    .find(|n| local(n) == which)
                    .ok_or_else(|| SldError::InvalidFilter(format!("PropertyIsBetween needs {which}")))
                    .and_then(literal_in)
            };
            FilterExpr::IsBetween {
                property,
                low: bound("LowerBoundary")?,
                high: bound("UpperBoundary")?,
            }
        }
        "And" | "Or" => {
            let children = elements(node).map(|c| filter_expr(c, depth + 1)).collect::<Result<Vec<_>>>()?;
            if children.len() < 2 {
                return Err(SldError::InvalidFilter(format!("<{name}> needs at least two operands")));
            }
            if name == "And" {
                FilterExpr::And(children)
            } else {
                FilterExpr::Or(children)
            }
        }
        "Not" => {
            let mut it = elements(node);
            let inner = it
                .next()
                .ok_or_else(|| SldError::InvalidFilter("<Not> needs an operand".into()))?;
            if it.next().is_some() {
                return Err(SldError::InvalidFilter("<Not> takes exactly one operand".into()));
            }
            FilterExpr::Not(Box::new(filter_expr(inner, depth + 1)?))
        }
        other => return Err(SldError::InvalidFilter(format!("unsupported operator <{other}>"))),
    };
    Ok(expr)
}
