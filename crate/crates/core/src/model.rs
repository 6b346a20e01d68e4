//! Geometric and feature primitives shared by every other module.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A position in world (map) units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2D { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point2D {
    fn from((x, y): (f64, f64)) -> Self {
        Point2D { x, y }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("polyline needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon ring {ring} is not closed or has fewer than 4 points")]
    OpenRing { ring: usize },
    #[error("polygon has no rings")]
    NoRings,
    #[error("non-finite coordinate")]
    NonFinite,
}

/// Feature geometry. Construct through the checked constructors to keep the
/// vertex-count and ring-closure invariants.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    PolyLine(Vec<Point2D>),
    Polygon(Vec<Vec<Point2D>>),
    Point(Point2D),
}

impl Geometry {
    pub fn polyline(vertices: Vec<Point2D>) -> Result<Self, GeometryError> {
        if vertices.len() < 2 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if !vertices.iter().all(Point2D::is_finite) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Geometry::PolyLine(vertices))
    }

    pub fn polygon(rings: Vec<Vec<Point2D>>) -> Result<Self, GeometryError> {
        if rings.is_empty() {
            return Err(GeometryError::NoRings);
        }
        for (i, ring) in rings.iter().enumerate() {
            if ring.len() < 4 || ring.first() != ring.last() {
                return Err(GeometryError::OpenRing { ring: i });
            }
            if !ring.iter().all(Point2D::is_finite) {
                return Err(GeometryError::NonFinite);
            }
        }
        Ok(Geometry::Polygon(rings))
    }

    pub fn point(p: Point2D) -> Result<Self, GeometryError> {
        if !p.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        Ok(Geometry::Point(p))
    }

    /// Iterates over every vertex, ring vertices included.
    pub fn vertices(&self) -> Box<dyn Iterator<Item = &Point2D> + '_> {
        match self {
            Geometry::PolyLine(v) => Box::new(v.iter()),
            Geometry::Polygon(rings) => Box::new(rings.iter().flatten()),
            Geometry::Point(p) => Box::new(std::iter::once(p)),
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Geometry::PolyLine(_) => "LineString",
            Geometry::Polygon(_) => "Polygon",
            Geometry::Point(_) => "Point",
        }
    }
}

/// A typed attribute value. Storage keeps the type; filters coerce at
/// comparison time.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeValue {
    Text(String),
    Number(f64),
    Integer(i64),
    Boolean(bool),
}

impl AttributeValue {
    /// Numeric view of Number/Integer values.
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            AttributeValue::Number(n) => Some(n),
            AttributeValue::Integer(i) => Some(i as f64),
            _ => None,
        }
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Text(s) => f.write_str(s),
            AttributeValue::Number(n) => write!(f, "{n}"),
            AttributeValue::Integer(i) => write!(f, "{i}"),
            AttributeValue::Boolean(b) => write!(f, "{b}"),
        }
    }
}

/// Attribute names are case-sensitive. A sorted map keeps serialization and
/// iteration deterministic.
pub type Attributes = BTreeMap<String, AttributeValue>;

#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub id: String,
    pub geometry: Geometry,
    pub attributes: Attributes,
}

impl Feature {
    pub fn new(id: impl Into<String>, geometry: Geometry) -> Self {
        Feature {
            id: id.into(),
            geometry,
            attributes: Attributes::new(),
        }
    }

    pub fn with_attribute(mut self, name: impl Into<String>, value: AttributeValue) -> Self {
        self.attributes.insert(name.into(), value);
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeValue> {
        self.attributes.get(name)
    }
}

/// The stream of features a layer defines.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureCollection {
    pub layer_name: String,
    pub features: Vec<Feature>,
}

impl FeatureCollection {
    pub fn new(layer_name: impl Into<String>, features: Vec<Feature>) -> Self {
        FeatureCollection {
            layer_name: layer_name.into(),
            features,
        }
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Union of attribute names across all features.
    pub fn attribute_names(&self) -> std::collections::BTreeSet<String> {
        self.features
            .iter()
            .flat_map(|f| f.attributes.keys().cloned())
            .collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BboxError {
    #[error("degenerate or inverted bounding box ({0}, {1}, {2}, {3})")]
    Degenerate(f64, f64, f64, f64),
    #[error("bounding box needs 4 comma-separated numbers")]
    Malformed,
}

/// Axis-aligned world rectangle; always strictly positive in both extents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
}

impl BoundingBox {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Self, BboxError> {
        let finite = [min_x, min_y, max_x, max_y].iter().all(|v| v.is_finite());
        if !finite || !(min_x < max_x) || !(min_y < max_y) || !(max_x - min_x).is_normal() || !(max_y - min_y).is_normal() {
            return Err(BboxError::Degenerate(min_x, min_y, max_x, max_y));
        }
        Ok(BoundingBox {
            min_x,
            min_y,
            max_x,
            max_y,
        })
    }

    pub fn min_x(&self) -> f64 {
        self.min_x
    }
    pub fn min_y(&self) -> f64 {
        self.min_y
    }
    pub fn max_x(&self) -> f64 {
        self.max_x
    }
    pub fn max_y(&self) -> f64 {
        self.max_y
    }
    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }
    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn contains(&self, p: &Point2D) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }
}

impl FromStr for BoundingBox {
    type Err = BboxError;

    /// Parses `minx,miny,maxx,maxy`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| BboxError::Malformed)?;
        match parts[..] {
            [a, b, c, d] => BoundingBox::new(a, b, c, d),
            _ => Err(BboxError::Malformed),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid color {0:?}, expected #RRGGBB")]
pub struct ColorError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color {
    pub r: u8,
    pub g: u8,
    pub b: u8,
    pub a: u8,
}

impl Color {
    pub const BLACK: Color = Color::rgb(0, 0, 0);
    pub const WHITE: Color = Color::rgb(255, 255, 255);

    pub const fn rgb(r: u8, g: u8, b: u8) -> Self {
        Color { r, g, b, a: 255 }
    }

    pub fn to_rgba(self) -> [u8; 4] {
        [self.r, self.g, self.b, self.a]
    }

    /// Channel-wise linear interpolation, rounded to nearest.
    pub fn lerp(self, other: Color, t: f64) -> Color {
        let mix = |a: u8, b: u8| -> u8 {
            let v = a as f64 + (b as f64 - a as f64) * t;
            v.round().clamp(0.0, 255.0) as u8
        };
        Color {
            r: mix(self.r, other.r),
            g: mix(self.g, other.g),
            b: mix(self.b, other.b),
            a: mix(self.a, other.a),
        }
    }

    /// Parses a hex string written with some prefix (`#`, `0x`).
    fn parse_hex_digits(digits: &str, original: &str) -> Result<Self, ColorError> {
        if digits.len() != 6 || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(ColorError(original.to_string()));
        }
        let channel = |i: usize| u8::from_str_radix(&digits[i..i + 2], 16).unwrap();
        Ok(Color::rgb(channel(0), channel(2), channel(4)))
    }

    /// WMS BGCOLOR form, `0xRRGGBB`. `#RRGGBB` is also accepted.
    pub fn parse_wms(s: &str) -> Result<Self, ColorError> {
        let t = s.trim();
        if let Some(d) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
            Color::parse_hex_digits(d, s)
        } else {
            t.parse()
        }
    }
}

impl Default for Color {
    fn default() -> Self {
        Color::BLACK
    }
}

impl FromStr for Color {
    type Err = ColorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().strip_prefix('#') {
            Some(d) => Color::parse_hex_digits(d, s),
            None => Err(ColorError(s.to_string())),
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02X}{:02X}{:02X}", self.r, self.g, self.b)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("feature collection has no vertices")]
pub struct EmptyCollection;

/// Tight axis-aligned bounds over every vertex of every feature.
///
/// A collection whose vertices are all collinear on one axis cannot form a
/// valid [`BoundingBox`]; such input is reported as [`EmptyCollection`] too.
pub fn collection_bbox(fc: &FeatureCollection) -> Result<BoundingBox, EmptyCollection> {
    let mut it = fc.features.iter().flat_map(|f| f.geometry.vertices());
    let first = it.next().ok_or(EmptyCollection)?;
    let (mut x0, mut y0, mut x1, mut y1) = (first.x, first.y, first.x, first.y);
    for p in it {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    BoundingBox::new(x0, y0, x1, y1).map_err(|_| EmptyCollection)
}

/// Maps a world point into fractional pixel space. The y axis flips:
/// `max_y` lands on row 0 (top) and `min_y` on `height`.
pub fn world_to_pixel(p: Point2D, bbox: &BoundingBox, width: u32, height: u32) -> (f64, f64) {
    let px = (p.x - bbox.min_x) / bbox.width() * width as f64;
    let py = (bbox.max_y - p.y) / bbox.height() * height as f64;
    (px, py)
}
