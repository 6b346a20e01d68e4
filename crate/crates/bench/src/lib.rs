//! Benchmark inputs shared by the criterion targets.

use contourwms::contour::DemGrid;

/// A smooth `n x n` DEM with a few peaks, values roughly 300..900.
pub fn synthetic_dem(n: usize) -> DemGrid {
    let mut values = Vec::with_capacity(n * n);
    for row in 0..n {
        for col in 0..n {
            let (x, y) = (col as f64 / n as f64, row as f64 / n as f64);
            let v = 600.0
                + 200.0 * (x * 7.0).sin() * (y * 5.0).cos()
                + 100.0 * ((x - 0.3).powi(2) + (y - 0.6).powi(2)).sqrt().cos();
            values.push(v);
        }
    }
    DemGrid::new(n, n, 0.0, 0.0, 10.0, -9999.0, values).expect("valid synthetic grid")
}
