//! Raster map rendering: painter's-model geometry pass, then label pass.

mod glyphs;
mod labels;
mod png;
mod stroke;

use std::sync::Arc;

use thiserror::Error;
use tracing::debug;

use crate::filter::evaluate;
use crate::model::{world_to_pixel, BoundingBox, Color, FeatureCollection, Geometry, Point2D};
use crate::sld::{Symbolizer, TextSymbolizer, UserStyle};

pub use self::glyphs::{glyph, FontMetrics, Glyph};
pub use self::labels::{place_labels, LabelFootprint, LabelPlacer, PixelRect, SLIDE_STEP};
pub use self::png::{decode_png, encode_png, PngError};
pub use self::stroke::{draw_polyline, fill_disc, PixelPoint};

/// Largest accepted canvas side, in pixels.
pub const MAX_DIMENSION: u32 = 8192;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("canvas size {width}x{height} outside 1..={max}", max = MAX_DIMENSION)]
    CanvasTooLarge { width: u32, height: u32 },
    #[error("pixel buffer holds {got} bytes, expected {expected}")]
    BufferSize { expected: usize, got: usize },
}

/// An RGBA8 raster, row-major from the top-left.
#[derive(Clone, PartialEq, Eq)]
pub struct Canvas {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for Canvas {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Canvas({}x{})", self.width, self.height)
    }
}

impl Canvas {
    pub fn new(width: u32, height: u32, background: Color) -> Result<Self, RenderError> {
        check_size(width, height)?;
        let pixels = background.to_rgba().repeat(width as usize * height as usize);
        Ok(Canvas { width, height, pixels })
    }

    pub fn from_rgba(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, RenderError> {
        check_size(width, height)?;
        let expected = width as usize * height as usize * 4;
        if pixels.len() != expected {
            return Err(RenderError::BufferSize {
                expected,
                got: pixels.len(),
            });
        }
        Ok(Canvas { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Panics if `(x, y)` is out of bounds.
    pub fn pixel(&self, x: u32, y: u32) -> Color {
        assert!(x < self.width && y < self.height, "pixel ({x},{y}) outside canvas");
        let i = (y as usize * self.width as usize + x as usize) * 4;
        let p = &self.pixels[i..i + 4];
        Color {
            r: p[0],
            g: p[1],
            b: p[2],
            a: p[3],
        }
    }

    /// Opaque write; out-of-bounds coordinates are ignored.
    pub fn put(&mut self, x: i64, y: i64, color: Color) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let i = (y as usize * self.width as usize + x as usize) * 4;
        self.pixels[i..i + 4].copy_from_slice(&color.to_rgba());
    }
}

fn check_size(width: u32, height: u32) -> Result<(), RenderError> {
    if width == 0 || height == 0 || width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(RenderError::CanvasTooLarge { width, height });
    }
    Ok(())
}

/// A feature source paired with the style that draws it.
#[derive(Debug, Clone)]
pub struct ResolvedStyledLayer {
    pub features: Arc<FeatureCollection>,
    pub style: UserStyle,
}

/// What the label pass did.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RenderReport {
    pub labels: Vec<LabelFootprint>,
    pub dropped_labels: usize,
}

pub fn render_map(
    layers: &[ResolvedStyledLayer],
    bbox: &BoundingBox,
    width: u32,
    height: u32,
    background: Color,
) -> Result<Canvas, RenderError> {
    render_map_with_report(layers, bbox, width, height, background).map(|(c, _)| c)
}

struct LabelJob<'a> {
    sym: &'a TextSymbolizer,
    text: String,
    geometry: &'a Geometry,
}

/// Renders layers in order. Within a layer, FeatureTypeStyles and rules run
/// in document order; each feature passing a rule's filter is drawn with
/// each of its symbolizers, later paint overwriting earlier paint. Labels
/// are collected and placed after all geometry.
pub fn render_map_with_report(
    layers: &[ResolvedStyledLayer],
    bbox: &BoundingBox,
    width: u32,
    height: u32,
    background: Color,
) -> Result<(Canvas, RenderReport), RenderError> {
    let mut canvas = Canvas::new(width, height, background)?;
    let to_px = |p: &Point2D| world_to_pixel(*p, bbox, width, height);
    let mut jobs: Vec<LabelJob<'_>> = Vec::new();
    for layer in layers {
        for fts in &layer.style.feature_type_styles {
            for rule in &fts.rules {
                for feature in &layer.features.features {
                    if let Some(f) = &rule.filter {
                        if !evaluate(f, feature) {
                            continue;
                        }
                    }
                    for sym in &rule.symbolizers {
                        match sym {
                            Symbolizer::Line(l) => match &feature.geometry {
                                Geometry::PolyLine(v) => {
                                    let pts: Vec<PixelPoint> = v.iter().map(to_px).collect();
                                    draw_polyline(&mut canvas, &pts, l.stroke, l.stroke_width);
                                }
                                Geometry::Polygon(rings) => {
                                    for ring in rings {
                                        let pts: Vec<PixelPoint> = ring.iter().map(to_px).collect();
                                        draw_polyline(&mut canvas, &pts, l.stroke, l.stroke_width);
                                    }
                                }
                                Geometry::Point(_) => {}
                            },
                            Symbolizer::Text(t) => {
                                if let Some(v) = feature.attribute(&t.label_property) {
                                    jobs.push(LabelJob {
                                        sym: t,
                                        text: v.to_string(),
                                        geometry: &feature.geometry,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let mut placer = LabelPlacer::new();
    for job in &jobs {
        match job.geometry {
            Geometry::PolyLine(v) => {
                let pts: Vec<PixelPoint> = v.iter().map(to_px).collect();
                placer.place_on_line(&mut canvas, &pts, &job.text, job.sym);
            }
            Geometry::Polygon(rings) => {
                let pts: Vec<PixelPoint> = rings[0].iter().map(to_px).collect();
                placer.place_on_line(&mut canvas, &pts, &job.text, job.sym);
            }
            Geometry::Point(p) => {
                placer.place_at_point(&mut canvas, to_px(p), &job.text, job.sym);
            }
        }
    }
    let (labels, dropped_labels) = placer.into_parts();
    debug!(
        layers = layers.len(),
        labels = labels.len(),
        dropped = dropped_labels,
        "rendered map"
    );
    Ok((canvas, RenderReport { labels, dropped_labels }))
}
