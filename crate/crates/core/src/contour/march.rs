//! Marching squares over grid nodes.
//!
//! Cell corners are numbered clockwise from the north-west: 0 = NW, 1 = NE,
//! 2 = SE, 3 = SW. Edge `k` joins corner `k` and corner `k + 1` (mod 4), so
//! 0 = north, 1 = east, 2 = south, 3 = west. Segments are oriented with
//! higher ground on the right, which makes every shared edge the end of
//! exactly one segment and the start of exactly one other.

use std::collections::HashMap;

use tracing::warn;

use crate::model::{AttributeValue, Feature, FeatureCollection, Geometry, Point2D};

use super::grid::DemGrid;
use super::levels::classify_index;

pub const ELEVATION_ATTR: &str = "ELEVATION";
pub const INDEX_ATTR: &str = "INDEX";

/// Global edge identity: horizontal edges join `(col, row)` and
/// `(col + 1, row)`, vertical edges join `(col, row)` and `(col, row + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeKey {
    H(usize, usize),
    V(usize, usize),
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    from: EdgeKey,
    to: EdgeKey,
}

/// Nudge applied to node values that sit exactly on a level.
pub fn level_perturbation(level: f64) -> f64 {
    1e-9 * level.abs().max(1.0)
}

struct LevelTracer<'a> {
    dem: &'a DemGrid,
    level: f64,
    bump: f64,
}

impl<'a> LevelTracer<'a> {
    fn node(&self, col: usize, row: usize) -> f64 {
        let v = self.dem.value(col, row);
        if v == self.level {
            v + self.bump
        } else {
            v
        }
    }

    fn cell_edge(col: usize, row: usize, edge: usize) -> EdgeKey {
        match edge {
            0 => EdgeKey::H(col, row),
            1 => EdgeKey::V(col + 1, row),
            2 => EdgeKey::H(col, row + 1),
            _ => EdgeKey::V(col, row),
        }
    }

    /// Segments of one cell in a fixed order.
    fn cell_segments(&self, col: usize, row: usize, out: &mut Vec<Segment>) {
        let dem = self.dem;
        let raw = [
            dem.value(col, row),
            dem.value(col + 1, row),
            dem.value(col + 1, row + 1),
            dem.value(col, row + 1),
        ];
        if raw.iter().any(|v| dem.is_nodata(*v)) {
            return;
        }
        let corners = [
            self.node(col, row),
            self.node(col + 1, row),
            self.node(col + 1, row + 1),
            self.node(col, row + 1),
        ];
        let high = corners.map(|v| v > self.level);
        let crossing: Vec<usize> = (0..4).filter(|&k| high[k] != high[(k + 1) % 4]).collect();

        // (from-edge, to-edge) chosen so the corners clockwise from the
        // first edge to the second form the cut-off run.
        let mut emit = |a: usize, b: usize| {
            let cut_high = high[(a + 1) % 4];
            let (ea, eb) = (Self::cell_edge(col, row, a), Self::cell_edge(col, row, b));
            out.push(if cut_high {
                Segment { from: eb, to: ea }
            } else {
                Segment { from: ea, to: eb }
            });
        };

        match crossing.len() {
            2 => emit(crossing[0], crossing[1]),
            4 => {
                let center = corners.iter().sum::<f64>() / 4.0;
                // Average at or above the level joins the high corners, so the
                // low corners are the ones cut off.
                let cut_high = center < self.level;
                for (c, &h) in high.iter().enumerate() {
                    if h == cut_high {
                        emit((c + 3) % 4, c);
                    }
                }
            }
            _ => {}
        }
    }

    fn crossing_point(&self, edge: EdgeKey) -> Point2D {
        let dem = self.dem;
        let (c0, r0, c1, r1) = match edge {
            EdgeKey::H(c, r) => (c, r, c + 1, r),
            EdgeKey::V(c, r) => (c, r, c, r + 1),
        };
        let (v0, v1) = (self.node(c0, r0), self.node(c1, r1));
        let t = (self.level - v0) / (v1 - v0);
        match edge {
            EdgeKey::H(c, r) => Point2D::new(dem.node_x(c as f64 + t), dem.node_y(r as f64)),
            EdgeKey::V(c, r) => Point2D::new(dem.node_x(c as f64), dem.node_y(r as f64 + t)),
        }
    }

    /// Chains the level's segments into maximal polylines in scan order.
    fn trace(&self) -> Vec<Vec<Point2D>> {
        let dem = self.dem;
        let mut segments = Vec::new();
        for row in 0..dem.nrows - 1 {
            for col in 0..dem.ncols - 1 {
                self.cell_segments(col, row, &mut segments);
            }
        }
        let by_start: HashMap<EdgeKey, usize> = segments.iter().enumerate().map(|(i, s)| (s.from, i)).collect();
        let by_end: HashMap<EdgeKey, usize> = segments.iter().enumerate().map(|(i, s)| (s.to, i)).collect();
        let mut used = vec![false; segments.len()];
        let mut lines = Vec::new();

        for seed in 0..segments.len() {
            if used[seed] {
                continue;
            }
            // Walk back to the chain head; a loop brings us back to the seed.
            let mut head = seed;
            while let Some(&prev) = by_end.get(&segments[head].from) {
                if prev == seed || used[prev] {
                    break;
                }
                head = prev;
            }
            let mut points = vec![self.crossing_point(segments[head].from)];
            let mut current = head;
            loop {
                used[current] = true;
                points.push(self.crossing_point(segments[current].to));
                match by_start.get(&segments[current].to) {
                    Some(&next) if !used[next] => current = next,
                    _ => break,
                }
            }
            if let (Some(first), Some(last)) = (points.first().copied(), points.last_mut()) {
                // Closed loops share the end edge with the start edge.
                if segments[current].to == segments[head].from {
                    *last = first;
                }
            }
            lines.push(points);
        }
        lines
    }
}

/// Extracts contour polylines for each level, ids `C_001`, `C_002`, … by
/// level then trace order. Each feature carries `ELEVATION` and `INDEX`.
pub fn extract_contours(dem: &DemGrid, levels: &[f64]) -> FeatureCollection {
    let mut features = Vec::new();
    if levels.is_empty() {
        warn!("extract_contours called with no levels");
        return FeatureCollection::new("contours", features);
    }
    if dem.ncols < 2 || dem.nrows < 2 {
        warn!("grid {}x{} is too small to contour", dem.ncols, dem.nrows);
        return FeatureCollection::new("contours", features);
    }
    for &level in levels {
        let tracer = LevelTracer {
            dem,
            level,
            bump: level_perturbation(level),
        };
        let index = classify_index(levels, level).unwrap_or(false);
        for line in tracer.trace() {
            let id = format!("C_{:03}", features.len() + 1);
            features.push(
                Feature::new(id, Geometry::PolyLine(line))
                    .with_attribute(ELEVATION_ATTR, AttributeValue::Number(level))
                    .with_attribute(INDEX_ATTR, AttributeValue::Boolean(index)),
            );
        }
    }
    FeatureCollection::new("contours", features)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(ncols: usize, nrows: usize, values: Vec<f64>) -> DemGrid {
        DemGrid::new(ncols, nrows, 0.0, 0.0, 1.0, -9999.0, values).unwrap()
    }

    fn line_of(f: &Feature) -> &[Point2D] {
        match &f.geometry {
            Geometry::PolyLine(v) => v,
            g => panic!("unexpected geometry {g:?}"),
        }
    }

    #[test]
    fn two_by_two_horizontal_crossing() {
        let fc = extract_contours(&grid(2, 2, vec![0.0, 0.0, 10.0, 10.0]), &[5.0]);
        assert_eq!(fc.len(), 1);
        let f = &fc.features[0];
        assert_eq!(f.id, "C_001");
        assert_eq!(line_of(f), &[Point2D::new(0.0, 0.5), Point2D::new(1.0, 0.5)]);
        assert_eq!(f.attribute(ELEVATION_ATTR), Some(&AttributeValue::Number(5.0)));
        assert_eq!(f.attribute(INDEX_ATTR), Some(&AttributeValue::Boolean(true)));
    }

    #[test]
    fn constant_grid_has_no_contours() {
        assert!(extract_contours(&grid(3, 3, vec![7.0; 9]), &[5.0]).is_empty());
    }

    #[test]
    fn diamond_around_center_peak() {
        let mut values = vec![0.0; 9];
        values[4] = 10.0;
        let fc = extract_contours(&grid(3, 3, values), &[5.0]);
        assert_eq!(fc.len(), 1);
        let pts = line_of(&fc.features[0]);
        assert_eq!(pts.len(), 5);
        assert_eq!(pts.first(), pts.last());
        // Hand-enumerated: the four edge midpoints next to the center node.
        let mut expected = vec![(0.5, 1.0), (1.0, 1.5), (1.5, 1.0), (1.0, 0.5)];
        let mut got: Vec<(f64, f64)> = pts[..4].iter().map(|p| (p.x, p.y)).collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, expected);
        // High ground on the right: clockwise around the peak.
        let area: f64 = pts.windows(2).map(|w| w[0].x * w[1].y - w[1].x * w[0].y).sum();
        assert!(area < 0.0);
    }

    #[test]
    fn saddle_resolution_uses_center_average() {
        // NW and SE high; average 5.5 ≥ 5 joins them, cutting off NE and SW.
        let fc = extract_contours(&grid(2, 2, vec![10.0, 0.0, 2.0, 10.0]), &[5.0]);
        assert_eq!(fc.len(), 2);
        for f in &fc.features {
            let pts = line_of(f);
            let near_ne = pts.iter().all(|p| p.x >= 0.5 && p.y >= 0.5);
            let near_sw = pts.iter().all(|p| p.x <= 0.5 && p.y <= 0.5);
            assert!(near_ne || near_sw, "{pts:?}");
        }
        // Average 4.5 < 5: the high corners are cut off instead.
        let fc = extract_contours(&grid(2, 2, vec![10.0, 0.0, 0.0, 8.0]), &[5.0]);
        assert_eq!(fc.len(), 2);
        for f in &fc.features {
            let pts = line_of(f);
            let near_nw = pts.iter().all(|p| p.x <= 0.5 + 1e-12 && p.y >= 0.5 - 1e-12);
            let near_se = pts.iter().all(|p| p.x >= 0.5 - 1e-12 && p.y <= 0.5 + 1e-12);
            assert!(near_nw || near_se, "{pts:?}");
        }
    }

    #[test]
    fn exact_node_values_are_perturbed() {
        // Node equal to the level counts as slightly above it.
        let fc = extract_contours(&grid(2, 2, vec![5.0, 5.0, 0.0, 0.0]), &[5.0]);
        assert_eq!(fc.len(), 1);
        for p in line_of(&fc.features[0]) {
            assert!((p.y - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn nodata_cells_are_skipped() {
        // 3x2: left cell touches nodata, right cell is valid.
        let values = vec![-9999.0, 0.0, 0.0, 10.0, 10.0, 10.0];
        let fc = extract_contours(&grid(3, 2, values), &[5.0]);
        assert_eq!(fc.len(), 1);
        for p in line_of(&fc.features[0]) {
            assert!(p.x >= 1.0);
        }
    }

    #[test]
    fn ids_follow_level_then_trace_order() {
        let values: Vec<f64> = (0..4).flat_map(|r| (0..4).map(move |c| (c + r) as f64 * 10.0)).collect();
        let fc = extract_contours(&grid(4, 4, values), &[15.0, 25.0, 35.0]);
        let ids: Vec<&str> = fc.features.iter().map(|f| f.id.as_str()).collect();
        assert_eq!(ids, ["C_001", "C_002", "C_003"]);
        let elev: Vec<f64> = fc
            .features
            .iter()
            .map(|f| f.attribute(ELEVATION_ATTR).unwrap().as_f64().unwrap())
            .collect();
        assert_eq!(elev, [15.0, 25.0, 35.0]);
    }

    #[test]
    fn empty_levels_return_empty() {
        assert!(extract_contours(&grid(2, 2, vec![0.0; 4]), &[]).is_empty());
    }
}
