//! Built-in monospace stroke font.
//!
//! Glyphs live on a grid 4 units wide with the cap line at y=0, the baseline
//! at y=6 and descenders down to y=8. Strokes are strings of digit pairs
//! `xy`; a space separates strokes. Lowercase letters reuse the capitals,
//! squeezed to x-height.

use crate::sld::{FontSpec, FontStyle, FontWeight};

/// Advance of an ordinary glyph, in grid units.
pub const ADVANCE_UNITS: f64 = 5.0;
/// Grid units between the cap line and the baseline.
pub const CAP_UNITS: f64 = 6.0;

fn strokes_for(c: char) -> Option<&'static str> {
    Some(match c {
        ' ' => "",
        '!' => "2024 2526",
        '"' => "1011 3031",
        '#' => "1115 3135 0242 0444",
        '$' => "400003434606 2026",
        '%' => "0640 0011 3546",
        '&' => "4602102104162644",
        '\'' => "2021",
        '(' => "20121426",
        ')' => "20323426",
        '*' => "1135 3115 0343",
        '+' => "0343 2125",
        ',' => "1607",
        '-' => "0343",
        '.' => "2526",
        '/' => "0640",
        '0' => "0040460600 0640",
        '1' => "1120 2026 1636",
        '2' => "004043030646",
        '3' => "00404606 1343",
        '4' => "000343 4046",
        '5' => "400003434606",
        '6' => "400006464303",
        '7' => "004016",
        '8' => "0040460600 0343",
        '9' => "430300404606",
        ':' => "2122 2526",
        ';' => "2122 2517",
        '<' => "400346",
        '=' => "0242 0444",
        '>' => "004306",
        '?' => "01103041422324 2526",
        '@' => "343212144440000646",
        'A' => "0602204246 0343",
        'B' => "003041423303 334445360600",
        'C' => "40000646",
        'D' => "00304145360600",
        'E' => "40000646 0333",
        'F' => "400006 0333",
        'G' => "400006464323",
        'H' => "0006 4046 0343",
        'I' => "0040 2026 0646",
        'J' => "40460604",
        'K' => "0006 400346",
        'L' => "000646",
        'M' => "0600234046",
        'N' => "06004640",
        'O' => "0040460600",
        'P' => "0600404303",
        'Q' => "0040460600 2446",
        'R' => "0600404303 1346",
        'S' => "400003434606",
        'T' => "0040 2026",
        'U' => "00064640",
        'V' => "002640",
        'W' => "0016233640",
        'X' => "0046 4006",
        'Y' => "002340 2326",
        'Z' => "00400646",
        '[' => "30101636",
        '\\' => "0046",
        ']' => "10303616",
        '^' => "022042",
        '_' => "0747",
        '`' => "1021",
        '{' => "30212213242536",
        '|' => "2027",
        '}' => "10212233242516",
        '~' => "03123443",
        _ => return None,
    })
}

fn parse_strokes(spec: &str, squeeze: bool) -> Vec<Vec<(f64, f64)>> {
    spec.split_whitespace()
        .map(|stroke| {
            stroke
                .as_bytes()
                .chunks(2)
                .map(|p| {
                    let x = f64::from(p[0] - b'0');
                    let y = f64::from(p[1] - b'0');
                    (x, if squeeze { 2.0 + y * 4.0 / 6.0 } else { y })
                })
                .collect()
        })
        .collect()
}

/// One glyph in grid units.
#[derive(Debug, Clone, PartialEq)]
pub struct Glyph {
    pub advance: f64,
    pub strokes: Vec<Vec<(f64, f64)>>,
}

/// Looks up `c`; characters outside printable ASCII render as `?`.
pub fn glyph(c: char) -> Glyph {
    let (spec, squeeze) = if c.is_ascii_lowercase() {
        (strokes_for(c.to_ascii_uppercase()), true)
    } else {
        (strokes_for(c), false)
    };
    let spec = spec.unwrap_or_else(|| strokes_for('?').unwrap_or(""));
    let advance = match c {
        ' ' => 3.0,
        _ => ADVANCE_UNITS,
    };
    Glyph {
        advance,
        strokes: parse_strokes(spec, squeeze),
    }
}

/// Pixel metrics for a font.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FontMetrics {
    /// Pixels per grid unit.
    pub unit: f64,
    pub stroke_width: f64,
    /// Horizontal shear per unit of height above the baseline.
    pub slant: f64,
}

impl FontMetrics {
    pub fn for_font(font: &FontSpec) -> Self {
        let unit = font.size / CAP_UNITS;
        let base = (font.size / 10.0).max(1.0);
        FontMetrics {
            unit,
            stroke_width: match font.weight {
                FontWeight::Normal => base,
                FontWeight::Bold => base * 1.75,
            },
            slant: match font.style {
                FontStyle::Normal => 0.0,
                FontStyle::Italic => 0.2,
            },
        }
    }

    pub fn text_width(&self, text: &str) -> f64 {
        let units: f64 = text.chars().map(|c| glyph(c).advance).sum();
        // Drop the trailing gap after the last glyph.
        (units - 1.0).max(0.0) * self.unit
    }
}
