//! A strictly convex norm giving prescribed points integer distances.
//!
//! The unit vectors along all connecting lines are distinct and centrally
//! symmetric. After scaling the points, every distance is rounded down and
//! its two direction vectors are stretched by the same ratio, which stays
//! small enough to keep all vectors in strictly convex position. Circular
//! arcs through consecutive vectors then bound the unit ball.

use serde::{Deserialize, Serialize};

use crate::constructions::{slope_distinctness_check, SlopeCheck};
use crate::error::{Error, Result};
use crate::norm::{ArcBody, CircularArc, NormSpec, StrictnessConfig};
use crate::point::Point;

/// Scale factors above this are reported as failures.
pub const MAX_SCALE: f64 = 1e12;
const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegerNorm {
    pub norm: NormSpec,
    pub scaled_points: Vec<Point>,
    pub target_distances: Vec<Vec<u64>>,
    /// Factor applied to the input points.
    pub scale: f64,
    /// Stretch allowance the construction worked with.
    pub epsilon: f64,
    /// Boundary vectors the arcs pass through, by increasing angle.
    pub boundary_vectors: Vec<Point>,
}

impl IntegerNorm {
    pub fn body(&self) -> &ArcBody {
        match self.norm.kind() {
            crate::norm::NormKind::Arcs(b) => b,
            _ => unreachable!("constructed norms are arc bodies"),
        }
    }
}

/// Largest stretch `ε` such that scaling any subset of the unit vectors
/// (sorted by angle, covering the full circle) by at most `1 + ε` keeps
/// every vector strictly outside the chord of its neighbors.
///
/// For neighbors at angular distances `α`, `β`, the chord meets the middle
/// ray at radius `sin(α+β) / (sin α + sin β)`.
pub fn convex_position_margin(angles: &[f64]) -> f64 {
    let m = angles.len();
    let tau = std::f64::consts::TAU;
    (0..m)
        .map(|k| {
            let prev = angles[(k + m - 1) % m];
            let next = angles[(k + 1) % m];
            let alpha = (angles[k] - prev).rem_euclid(tau);
            let beta = (next - angles[k]).rem_euclid(tau);
            (alpha.sin() + beta.sin()) / (alpha + beta).sin() - 1.0
        })
        .fold(f64::INFINITY, f64::min)
}

/// Arc through `a` then `b` (counterclockwise) with radius `r`, bulging away
/// from the origin.
fn arc_between(a: Point, b: Point, r: f64) -> Option<CircularArc> {
    let half = 0.5 * a.euclidean_distance(b);
    if r <= half {
        return None;
    }
    let inward = (b - a).perp().normalized();
    let center = a.lerp(b, 0.5) + inward * (r * r - half * half).sqrt();
    let (ra, rb) = (a - center, b - center);
    let start = ra.angle();
    Some(CircularArc {
        center,
        radius: r,
        start_angle: start,
        end_angle: start + ra.cross(rb).atan2(ra.dot(rb)),
    })
}

pub fn norm_for_integer_distances(points: &[Point]) -> Result<IntegerNorm> {
    let n = points.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!("need at least three points, got {n}")));
    }
    if let SlopeCheck::Collision { first, second } = slope_distinctness_check(points)? {
        return Err(Error::SlopeCollision { first, second });
    }

    // One direction per pair, in [0, π), together with its pair.
    let pi = std::f64::consts::PI;
    let mut dirs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = points[j] - points[i];
            dirs.push((d.angle().rem_euclid(pi), i, j));
        }
    }
    dirs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let angles: Vec<f64> = dirs
        .iter()
        .map(|d| d.0)
        .chain(dirs.iter().map(|d| d.0 + pi))
        .collect();
    let epsilon = convex_position_margin(&angles) / 4.0;
    if !(epsilon > 0.0) {
        return Err(Error::ConstructionFailed(
            "direction vectors are not in strictly convex position".into(),
        ));
    }

    let min_d = dirs
        .iter()
        .map(|&(_, i, j)| points[i].euclidean_distance(points[j]))
        .fold(f64::INFINITY, f64::min);
    let scale = (1.0 + 1.0 / epsilon) / min_d;
    if !(scale.is_finite() && scale <= MAX_SCALE) {
        return Err(Error::ConstructionFailed(format!(
            "scale {scale:e} exceeds {MAX_SCALE:e}"
        )));
    }
    let scaled_points: Vec<Point> = points.iter().map(|&p| p * scale).collect();

    let mut targets = vec![vec![0u64; n]; n];
    let mut half_vectors = Vec::with_capacity(dirs.len());
    for &(theta, i, j) in &dirs {
        let d = scaled_points[i].euclidean_distance(scaled_points[j]);
        let k = d.floor();
        targets[i][j] = k as u64;
        targets[j][i] = k as u64;
        half_vectors.push(Point::from_angle(theta) * (d / k));
    }
    let vectors: Vec<Point> = half_vectors
        .iter()
        .copied()
        .chain(half_vectors.iter().map(|&v| -v))
        .collect();

    let m = vectors.len();
    let longest = vectors.iter().map(|v| v.length()).fold(0.0, f64::max);
    let mut radius = 100.0 * longest;
    let cfg = StrictnessConfig::default();
    let mut body = None;
    for _ in 0..MAX_DOUBLINGS {
        let first: Option<Vec<CircularArc>> = (0..m / 2)
            .map(|k| arc_between(vectors[k], vectors[k + 1], radius))
            .collect();
        if let Some(first) = first {
            let arcs: Vec<CircularArc> = first
                .iter()
                .copied()
                .chain(first.iter().map(CircularArc::negated))
                .collect();
            if let Ok(b) = ArcBody::new(arcs) {
                let spec = NormSpec::arcs(b);
                if spec.strictness_margin(&cfg) > 0.0 {
                    body = Some(spec);
                    break;
                }
            }
        }
        radius *= 2.0;
    }
    let norm = body.ok_or_else(|| {
        Error::ConstructionFailed("no arc radius kept the boundary strictly convex".into())
    })?;

    for i in 0..n {
        for j in i + 1..n {
            let d = norm.distance(scaled_points[i], scaled_points[j]);
            if (d - targets[i][j] as f64).abs() > 1e-6 {
                return Err(Error::ConstructionFailed(format!(
                    "distance {i}-{j} is {d}, expected {}",
                    targets[i][j]
                )));
            }
        }
    }
    Ok(IntegerNorm {
        norm,
        scaled_points,
        target_distances: targets,
        scale,
        epsilon,
        boundary_vectors: vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DistanceField;
    use crate::enumerate::verify_integer_distances;
    use rand::{Rng, SeedableRng};

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    /// Boundary point along `v` found by bisection on the norm, without the
    /// radial function.
    fn boundary_by_bisection(norm: &NormSpec, v: Point) -> Point {
        let dir = v.normalized();
        let (mut lo, mut hi) = (0.0, 1.0);
        while norm.norm(dir * hi) < 1.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if norm.norm(dir * mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        dir * lo
    }

    fn check(points: &[Point]) -> IntegerNorm {
        let r = norm_for_integer_distances(points).unwrap();
        assert!(r.norm.strictness_margin(&StrictnessConfig::default()) > 0.0);
        let field = DistanceField::NormPlane(r.norm.clone());
        let v = verify_integer_distances(&field, &r.scaled_points, 1e-6).unwrap();
        assert!(v.ok, "worst {}", v.worst);
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                assert!((v.matrix[i][j] - r.target_distances[i][j] as f64).abs() < 1e-6);
            }
        }
        for &b in &r.boundary_vectors {
            assert!((r.norm.radial(b.angle()) - b.length()).abs() < 1e-9);
            assert!((boundary_by_bisection(&r.norm, b) - b).length() < 1e-9);
        }
        r
    }

    #[test]
    fn right_triangle() {
        let r = check(&[p(0., 0.), p(1., 0.), p(0., 2.)]);
        assert_eq!(r.boundary_vectors.len(), 6);
    }

    #[test]
    fn seeded_four_points() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let pts: Vec<Point> = (0..4)
            .map(|_| p(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)))
            .collect();
        let r = check(&pts);
        assert_eq!(r.boundary_vectors.len(), 12);
    }

    #[test]
    fn square_corners_collide() {
        let sq = [p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        assert!(matches!(
            norm_for_integer_distances(&sq),
            Err(Error::SlopeCollision { .. })
        ));
    }

    #[test]
    fn margin_of_regular_hexagon() {
        // Neighbors 60° apart: (2 sin 60°) / sin 120° − 1 = 1.
        let angles: Vec<f64> = (0..6).map(|k| k as f64 * std::f64::consts::FRAC_PI_3).collect();
        assert!((convex_position_margin(&angles) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stretched_vectors_stay_convex() {
        // Stretch every other hexagon vector by 1 + margin·0.99 and check
        // the unstretched ones remain outside the chords.
        let angles: Vec<f64> = (0..6).map(|k| k as f64 * std::f64::consts::FRAC_PI_3 + 0.1 * (k % 3) as f64).collect();
        let eps = convex_position_margin(&angles);
        let v: Vec<Point> = angles
            .iter()
            .enumerate()
            .map(|(k, &a)| Point::from_angle(a) * if k % 2 == 0 { 1.0 + 0.99 * eps } else { 1.0 })
            .collect();
        for k in (1..6).step_by(2) {
            let (a, b, c) = (v[k - 1], v[k], v[(k + 1) % 6]);
            assert!((c - a).cross(b - a) < 0.0, "vertex {k} fell inside");
        }
    }
}
