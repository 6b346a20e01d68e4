//! Greedy along-line label placement.

use super::glyphs::{glyph, FontMetrics, CAP_UNITS};
use super::stroke::{clip_segment, draw_polyline, PixelPoint};
use super::Canvas;
use crate::sld::{LabelPlacement, TextSymbolizer};

/// Arc-length step used when sliding a rejected label.
pub const SLIDE_STEP: f64 = 10.0;
const ANGLE_EPS: f64 = 1e-9;
/// Upper bound on anchors tried for one feature.
const MAX_ANCHORS: usize = 100_000;

/// Axis-aligned box in pixel space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelRect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl PixelRect {
    pub fn intersects(&self, o: &PixelRect) -> bool {
        self.x0 < o.x1 && o.x0 < self.x1 && self.y0 < o.y1 && o.y0 < self.y1
    }

    /// True when the center of pixel `(i, j)` lies in the box.
    pub fn contains_pixel(&self, i: u32, j: u32) -> bool {
        let (x, y) = (i as f64 + 0.5, j as f64 + 0.5);
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

/// Where a label went and the pixels it may have touched.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelFootprint {
    pub text: String,
    /// Pixel position of the label center.
    pub center: PixelPoint,
    /// Arc length of the label center, for line labels.
    pub arc_position: Option<f64>,
    /// One box per glyph, padded by the stroke width.
    pub boxes: Vec<PixelRect>,
}

impl LabelFootprint {
    pub fn overlaps(&self, other: &LabelFootprint) -> bool {
        self.boxes.iter().any(|a| other.boxes.iter().any(|b| a.intersects(b)))
    }

    pub fn contains_pixel(&self, i: u32, j: u32) -> bool {
        self.boxes.iter().any(|b| b.contains_pixel(i, j))
    }
}

/// A polyline with its cumulative arc lengths.
struct Path {
    pts: Vec<PixelPoint>,
    cum: Vec<f64>,
}

impl Path {
    fn new(line: &[PixelPoint]) -> Option<Path> {
        let mut pts: Vec<PixelPoint> = Vec::with_capacity(line.len());
        for &p in line {
            if !(p.0.is_finite() && p.1.is_finite()) {
                return None;
            }
            if pts.last() != Some(&p) {
                pts.push(p);
            }
        }
        if pts.len() < 2 {
            return None;
        }
        let mut cum = vec![0.0];
        for w in pts.windows(2) {
            let d = (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1);
            cum.push(cum.last().copied().unwrap_or(0.0) + d);
        }
        if !cum.last().is_some_and(|l| l.is_finite()) {
            return None;
        }
        Some(Path { pts, cum })
    }

    fn length(&self) -> f64 {
        self.cum[self.cum.len() - 1]
    }

    fn segment_at(&self, s: f64) -> usize {
        let k = self.cum.partition_point(|&c| c <= s);
        k.saturating_sub(1).min(self.pts.len() - 2)
    }

    /// Point and tangent angle at arc length `s`.
    fn at(&self, s: f64) -> (PixelPoint, f64) {
        let k = self.segment_at(s);
        let (a, b) = (self.pts[k], self.pts[k + 1]);
        let seg = self.cum[k + 1] - self.cum[k];
        let t = if seg > 0.0 { ((s - self.cum[k]) / seg).clamp(0.0, 1.0) } else { 0.0 };
        ((a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t), (b.1 - a.1).atan2(b.0 - a.0))
    }

    /// Sum of absolute turning angles (degrees) at vertices strictly inside `(lo, hi)`.
    fn angle_change(&self, lo: f64, hi: f64) -> f64 {
        let mut total = 0.0;
        for k in 1..self.pts.len() - 1 {
            if self.cum[k] > lo && self.cum[k] < hi {
                let (a, b, c) = (self.pts[k - 1], self.pts[k], self.pts[k + 1]);
                let d1 = (b.1 - a.1).atan2(b.0 - a.0);
                let d2 = (c.1 - b.1).atan2(c.0 - b.0);
                let mut turn = d2 - d1;
                while turn > std::f64::consts::PI {
                    turn -= std::f64::consts::TAU;
                }
                while turn < -std::f64::consts::PI {
                    turn += std::f64::consts::TAU;
                }
                total += turn.abs().to_degrees();
            }
        }
        total
    }

    /// Arc-length intervals whose points fall inside `bounds`.
    fn visible_intervals(&self, bounds: (f64, f64, f64, f64)) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for k in 0..self.pts.len() - 1 {
            let Some((t0, t1)) = clip_segment(self.pts[k], self.pts[k + 1], bounds) else { continue };
            let seg = self.cum[k + 1] - self.cum[k];
            let (a, b) = (self.cum[k] + t0 * seg, self.cum[k] + t1 * seg);
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        out
    }
}

/// One glyph placed in pixel space: center and baseline direction.
struct PlacedGlyph {
    ch: char,
    center: PixelPoint,
    angle: f64,
}

/// Accumulates footprints over one render so later labels avoid earlier ones.
#[derive(Debug, Default)]
pub struct LabelPlacer {
    placed: Vec<LabelFootprint>,
    dropped: usize,
}

impl LabelPlacer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn placed(&self) -> &[LabelFootprint] {
        &self.placed
    }

    /// Candidates that found no acceptable position.
    pub fn dropped(&self) -> usize {
        self.dropped
    }

    pub fn into_parts(self) -> (Vec<LabelFootprint>, usize) {
        (self.placed, self.dropped)
    }

    /// Places `text` along `line` per the symbolizer's vendor options and
    /// draws the accepted labels. Returns the footprints placed by this call.
    pub fn place_on_line(
        &mut self,
        canvas: &mut Canvas,
        line: &[PixelPoint],
        text: &str,
        sym: &TextSymbolizer,
    ) -> Vec<LabelFootprint> {
        let Some(path) = Path::new(line) else { return Vec::new() };
        if text.is_empty() {
            return Vec::new();
        }
        let metrics = FontMetrics::for_font(&sym.font);
        let label_len = metrics.text_width(text);
        let total = path.length();
        if label_len > total {
            self.dropped += 1;
            return Vec::new();
        }
        let v = &sym.vendor;
        let along = sym.placement == LabelPlacement::Line && v.follow_line;
        let mut out = Vec::new();
        for anchor in candidate_anchors(&path, canvas, label_len, sym) {
            let mut accepted = None;
            for offset in slide_offsets(v.max_displacement) {
                let c = anchor + offset;
                let (lo, hi) = (c - label_len / 2.0, c + label_len / 2.0);
                if lo < 0.0 || hi > total {
                    continue;
                }
                if along && path.angle_change(lo, hi) > v.max_angle_delta + ANGLE_EPS {
                    continue;
                }
                let glyphs = if along {
                    layout_along(&path, text, lo, hi, &metrics)
                } else {
                    layout_horizontal(path.at(c).0, text, &metrics)
                };
                let fp = footprint(text, path.at(c).0, Some(c), &glyphs, &metrics);
                if self.placed.iter().any(|p| p.overlaps(&fp)) {
                    continue;
                }
                accepted = Some((fp, glyphs));
                break;
            }
            match accepted {
                Some((fp, glyphs)) => {
                    draw_glyphs(canvas, &glyphs, sym, &metrics);
                    self.placed.push(fp.clone());
                    out.push(fp);
                }
                None => self.dropped += 1,
            }
        }
        out
    }

    /// A horizontal label centered on `p`; no sliding.
    pub fn place_at_point(
        &mut self,
        canvas: &mut Canvas,
        p: PixelPoint,
        text: &str,
        sym: &TextSymbolizer,
    ) -> Option<LabelFootprint> {
        if text.is_empty() || !(p.0.is_finite() && p.1.is_finite()) {
            return None;
        }
        let metrics = FontMetrics::for_font(&sym.font);
        let glyphs = layout_horizontal(p, text, &metrics);
        let fp = footprint(text, p, None, &glyphs, &metrics);
        if self.placed.iter().any(|q| q.overlaps(&fp)) {
            self.dropped += 1;
            return None;
        }
        draw_glyphs(canvas, &glyphs, sym, &metrics);
        self.placed.push(fp.clone());
        Some(fp)
    }
}

/// Places labels for a single polyline on a fresh placer.
pub fn place_labels(
    canvas: &mut Canvas,
    polyline: &[PixelPoint],
    text: &str,
    sym: &TextSymbolizer,
) -> Vec<LabelFootprint> {
    LabelPlacer::new().place_on_line(canvas, polyline, text, sym)
}

/// 0, +10, -10, +20, -20, ... up to `max`.
fn slide_offsets(max: f64) -> impl Iterator<Item = f64> {
    let steps = if max > 0.0 { (max / SLIDE_STEP).floor().min(1e6) as u64 } else { 0 };
    std::iter::once(0.0).chain((1..=steps).flat_map(|k| {
        let d = k as f64 * SLIDE_STEP;
        [d, -d]
    }))
}

/// Anchor arc lengths, limited to the part of the line that can reach the canvas.
fn candidate_anchors(path: &Path, canvas: &Canvas, label_len: f64, sym: &TextSymbolizer) -> Vec<f64> {
    let total = path.length();
    let repeat = sym.vendor.repeat;
    if !(repeat > 0.0) {
        return vec![total / 2.0];
    }
    let margin = label_len + sym.vendor.max_displacement + 2.0 * sym.font.size + SLIDE_STEP;
    let bounds = (
        -margin,
        -margin,
        canvas.width() as f64 + margin,
        canvas.height() as f64 + margin,
    );
    let mut anchors: Vec<f64> = Vec::new();
    let mut next_k = 0.0f64;
    for (a, b) in path.visible_intervals(bounds) {
        let lo = ((a - margin - repeat / 2.0) / repeat).ceil().max(next_k);
        let hi = ((b + margin - repeat / 2.0) / repeat).floor();
        let mut k = lo;
        while k <= hi && anchors.len() < MAX_ANCHORS {
            let s = repeat / 2.0 + k * repeat;
            if s > total {
                break;
            }
            anchors.push(s);
            k += 1.0;
        }
        next_k = next_k.max(hi + 1.0);
    }
    anchors
}

/// Glyph positions along the span `[lo, hi]`, flipped if needed so text reads left to right.
fn layout_along(path: &Path, text: &str, lo: f64, hi: f64, m: &FontMetrics) -> Vec<PlacedGlyph> {
    let (p0, _) = path.at(lo);
    let (p1, _) = path.at(hi);
    let (dx, dy) = (p1.0 - p0.0, p1.1 - p0.1);
    let reverse = dx < 0.0 || (dx == 0.0 && dy > 0.0);
    let mut out = Vec::new();
    let mut cursor = 0.0;
    for ch in text.chars() {
        let g = glyph(ch);
        let s = lo + (cursor + 2.0) * m.unit;
        cursor += g.advance;
        let (center, angle) = if reverse {
            let (p, a) = path.at(lo + hi - s);
            (p, a + std::f64::consts::PI)
        } else {
            path.at(s)
        };
        out.push(PlacedGlyph { ch, center, angle });
    }
    out
}

fn layout_horizontal(center: PixelPoint, text: &str, m: &FontMetrics) -> Vec<PlacedGlyph> {
    let start = center.0 - m.text_width(text) / 2.0;
    let mut cursor = 0.0;
    text.chars()
        .map(|ch| {
            let x = start + (cursor + 2.0) * m.unit;
            cursor += glyph(ch).advance;
            PlacedGlyph {
                ch,
                center: (x, center.1),
                angle: 0.0,
            }
        })
        .collect()
}

/// Maps glyph grid coordinates to pixels.
fn to_pixel(g: &PlacedGlyph, m: &FontMetrics, u: f64, v: f64) -> PixelPoint {
    let u = u + m.slant * (CAP_UNITS - v);
    let (sin, cos) = g.angle.sin_cos();
    let (a, b) = ((u - 2.0) * m.unit, (v - CAP_UNITS / 2.0) * m.unit);
    (g.center.0 + a * cos - b * sin, g.center.1 + a * sin + b * cos)
}

fn footprint(
    text: &str,
    center: PixelPoint,
    arc_position: Option<f64>,
    glyphs: &[PlacedGlyph],
    m: &FontMetrics,
) -> LabelFootprint {
    let pad = m.stroke_width / 2.0 + 1.5;
    let boxes = glyphs
        .iter()
        .map(|g| {
            let corners = [(0.0, 0.0), (4.0, 0.0), (0.0, 8.0), (4.0, 8.0)].map(|(u, v)| to_pixel(g, m, u, v));
            let mut r = PixelRect {
                x0: f64::INFINITY,
                y0: f64::INFINITY,
                x1: f64::NEG_INFINITY,
                y1: f64::NEG_INFINITY,
            };
            for (x, y) in corners {
                r.x0 = r.x0.min(x);
                r.y0 = r.y0.min(y);
                r.x1 = r.x1.max(x);
                r.y1 = r.y1.max(y);
            }
            // Slant pushes the cap line right of the cell.
            let slant = m.slant * CAP_UNITS * m.unit;
            PixelRect {
                x0: r.x0 - pad - slant,
                y0: r.y0 - pad - slant,
                x1: r.x1 + pad + slant,
                y1: r.y1 + pad + slant,
            }
        })
        .collect();
    LabelFootprint {
        text: text.to_string(),
        center,
        arc_position,
        boxes,
    }
}

fn draw_glyphs(canvas: &mut Canvas, glyphs: &[PlacedGlyph], sym: &TextSymbolizer, m: &FontMetrics) {
    for g in glyphs {
        for stroke in glyph(g.ch).strokes {
            let pts: Vec<PixelPoint> = stroke.iter().map(|&(u, v)| to_pixel(g, m, u, v)).collect();
            draw_polyline(canvas, &pts, sym.fill, m.stroke_width);
        }
    }
}
