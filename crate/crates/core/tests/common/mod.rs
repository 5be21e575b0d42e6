//! Oracles shared by the integration tests.

/// Every point with integer distances to (0,0), (3,0), (0,4), from exact
/// integer arithmetic.
///
/// With `d2 = d1 − w2`, `d3 = d1 − w3` the coordinates are
/// `x = (2·d1·w2 − w2² + 9)/6` and `y = (2·d1·w3 − w3² + 16)/8`, and `p`
/// exists iff `x² + y² = d1²`.
pub fn exact_345_points(max_d1: i128) -> Vec<(i128, i128, (f64, f64))> {
    let mut out = Vec::new();
    for d1 in 0..=max_d1 {
        for w2 in -3i128..=3 {
            for w3 in -4i128..=4 {
                if d1 - w2 < 0 || d1 - w3 < 0 {
                    continue;
                }
                let big_x = 2 * d1 * w2 - w2 * w2 + 9;
                let big_y = 2 * d1 * w3 - w3 * w3 + 16;
                if 16 * big_x * big_x + 9 * big_y * big_y == 576 * d1 * d1 {
                    out.push((w2, w3, (big_x as f64 / 6.0, big_y as f64 / 8.0)));
                }
            }
        }
    }
    out
}
