//! Aliased polyline rasterization.
//!
//! Pixel `(i, j)` covers `[i, i+1) x [j, j+1)`. Width ≤ 1 strokes use a
//! Bresenham trace over `floor`ed endpoints. Wider strokes fill every pixel
//! whose center lies in the segment rectangle, with the perpendicular extent
//! half-open `(-w/2, w/2]` measured along the downward/rightward normal, and
//! a disc of diameter `w` at each interior vertex.

use super::Canvas;
use crate::model::Color;

pub type PixelPoint = (f64, f64);

/// Liang–Barsky clip of a segment to `[x0, x1] x [y0, y1]`.
pub(crate) fn clip_segment(a: PixelPoint, b: PixelPoint, bounds: (f64, f64, f64, f64)) -> Option<(f64, f64)> {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    if !(a.0.is_finite() && a.1.is_finite() && dx.is_finite() && dy.is_finite()) {
        return None;
    }
    let (x0, y0, x1, y1) = bounds;
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for (p, q) in [(-dx, a.0 - x0), (dx, x1 - a.0), (-dy, a.1 - y0), (dy, y1 - a.1)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return None;
            }
        }
    }
    Some((t0, t1))
}

fn lerp(a: PixelPoint, b: PixelPoint, t: f64) -> PixelPoint {
    (a.0 + (b.0 - a.0) * t, a.1 + (b.1 - a.1) * t)
}

fn bresenham(canvas: &mut Canvas, a: PixelPoint, b: PixelPoint, color: Color) {
    let pad = 2.0;
    let bounds = (-pad, -pad, canvas.width() as f64 + pad, canvas.height() as f64 + pad);
    let Some((t0, t1)) = clip_segment(a, b, bounds) else { return };
    let (p, q) = (lerp(a, b, t0), lerp(a, b, t1));
    let (mut x, mut y) = (p.0.floor() as i64, p.1.floor() as i64);
    let (xe, ye) = (q.0.floor() as i64, q.1.floor() as i64);
    let dx = (xe - x).abs();
    let dy = -(ye - y).abs();
    let sx = if x < xe { 1 } else { -1 };
    let sy = if y < ye { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        canvas.put(x, y, color);
        if x == xe && y == ye {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

fn pixel_range(lo: f64, hi: f64, limit: u32) -> (i64, i64) {
    let lo = (lo.floor() as i64 - 1).max(0);
    let hi = (hi.ceil() as i64 + 1).min(limit as i64 - 1);
    (lo, hi)
}

fn thick_segment(canvas: &mut Canvas, a: PixelPoint, b: PixelPoint, width: f64, color: Color) {
    let half = width / 2.0;
    let pad = half + 2.0;
    let bounds = (-pad, -pad, canvas.width() as f64 + pad, canvas.height() as f64 + pad);
    let Some((t0, t1)) = clip_segment(a, b, bounds) else { return };
    let (p, q) = (lerp(a, b, t0), lerp(a, b, t1));
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let len = (dx * dx + dy * dy).sqrt();
    if len == 0.0 {
        return;
    }
    let (ux, uy) = (dx / len, dy / len);
    // Canonical normal points down (or right, for vertical segments) so the
    // half-open side does not depend on drawing direction.
    let (mut nx, mut ny) = (-uy, ux);
    if ny < 0.0 || (ny == 0.0 && nx < 0.0) {
        nx = -nx;
        ny = -ny;
    }
    let (x_lo, x_hi) = pixel_range(p.0.min(q.0) - half, p.0.max(q.0) + half, canvas.width());
    let (y_lo, y_hi) = pixel_range(p.1.min(q.1) - half, p.1.max(q.1) + half, canvas.height());
    for j in y_lo..=y_hi {
        let cy = j as f64 + 0.5 - p.1;
        for i in x_lo..=x_hi {
            let cx = i as f64 + 0.5 - p.0;
            let along = cx * ux + cy * uy;
            let across = cx * nx + cy * ny;
            if along >= 0.0 && along <= len && across > -half && across <= half {
                canvas.put(i, j, color);
            }
        }
    }
}

/// Filled disc of diameter `width` centered on `c`.
pub fn fill_disc(canvas: &mut Canvas, c: PixelPoint, width: f64, color: Color) {
    if !(c.0.is_finite() && c.1.is_finite()) {
        return;
    }
    let r = width / 2.0;
    let (x_lo, x_hi) = pixel_range(c.0 - r, c.0 + r, canvas.width());
    let (y_lo, y_hi) = pixel_range(c.1 - r, c.1 + r, canvas.height());
    let r2 = r * r;
    for j in y_lo..=y_hi {
        let dy = j as f64 + 0.5 - c.1;
        for i in x_lo..=x_hi {
            let dx = i as f64 + 0.5 - c.0;
            if dx * dx + dy * dy <= r2 {
                canvas.put(i, j, color);
            }
        }
    }
}

/// Strokes `vertices` (pixel space) with an opaque, aliased line.
pub fn draw_polyline(canvas: &mut Canvas, vertices: &[PixelPoint], stroke: Color, width: f64) {
    if vertices.len() < 2 || !(width > 0.0) {
        return;
    }
    if width <= 1.0 {
        for w in vertices.windows(2) {
            bresenham(canvas, w[0], w[1], stroke);
        }
        return;
    }
    for w in vertices.windows(2) {
        thick_segment(canvas, w[0], w[1], width, stroke);
    }
    for v in &vertices[1..vertices.len() - 1] {
        fill_disc(canvas, *v, width, stroke);
    }
    if vertices.len() > 2 && vertices.first() == vertices.last() {
        fill_disc(canvas, vertices[0], width, stroke);
    }
}
