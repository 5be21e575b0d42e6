//! Point sets with integer distances and the norms that give them.

mod arcnorm;
mod pythagorean;

pub use arcnorm::{convex_position_margin, norm_for_integer_distances, IntegerNorm, MAX_SCALE};
pub use pythagorean::{
    pythagorean_circle_set, ratio_to_f64, rational_sqrt, PythagoreanTriple, RationalPoint,
    RationalPointSet,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// Slopes closer than this (as angles) count as equal.
pub const SLOPE_TOL: f64 = 1e-9;

/// The `n×n` integer grid `{0..n−1}²`, row by row.
pub fn grid_set(n: usize) -> Result<Vec<Point>> {
    if n == 0 {
        return Err(Error::InvalidInput("grid size must be at least 1".into()));
    }
    Ok((0..n)
        .flat_map(|y| (0..n).map(move |x| Point::new(x as f64, y as f64)))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlopeCheck {
    Distinct,
    /// Two connecting lines with the same slope.
    Collision {
        first: (usize, usize),
        second: (usize, usize),
    },
}

/// Whether all lines through two of the points have distinct slopes.
pub fn slope_distinctness_check(points: &[Point]) -> Result<SlopeCheck> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidInput("need at least two points".into()));
    }
    let pi = std::f64::consts::PI;
    let mut slopes = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d = points[j] - points[i];
            if d.length() == 0.0 {
                return Err(Error::DuplicatePoint(i, j));
            }
            slopes.push((d.angle().rem_euclid(pi), (i, j)));
        }
    }
    slopes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for w in slopes.windows(2) {
        if w[1].0 - w[0].0 < SLOPE_TOL {
            return Ok(SlopeCheck::Collision {
                first: w[0].1,
                second: w[1].1,
            });
        }
    }
    // Angles just below π are parallel to angles just above 0.
    if slopes.len() >= 2 {
        let (lo, hi) = (slopes[0], slopes[slopes.len() - 1]);
        if lo.0 + pi - hi.0 < SLOPE_TOL {
            let (first, second) = if lo.1 < hi.1 { (lo.1, hi.1) } else { (hi.1, lo.1) };
            return Ok(SlopeCheck::Collision { first, second });
        }
    }
    Ok(SlopeCheck::Distinct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::verify_integer_distances;
    use crate::field::DistanceField;
    use crate::norm::NormSpec;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn grid_examples() {
        assert_eq!(grid_set(1).unwrap(), vec![p(0., 0.)]);
        assert!(grid_set(0).is_err());
        let g = grid_set(2).unwrap();
        assert_eq!(g.len(), 4);
        let l1 = DistanceField::NormPlane(NormSpec::l1());
        let m = verify_integer_distances(&l1, &g, 0.0).unwrap();
        let mut values: Vec<f64> = m.matrix.iter().flatten().copied().filter(|&d| d > 0.0).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        assert_eq!(values, vec![1.0, 2.0]);

        let linf = DistanceField::NormPlane(NormSpec::linf());
        let m = verify_integer_distances(&linf, &grid_set(3).unwrap(), 0.0).unwrap();
        assert!(m.ok);
        assert!(m.matrix.iter().flatten().all(|&d| d <= 2.0));
    }

    #[test]
    fn slope_examples() {
        assert_eq!(
            slope_distinctness_check(&[p(0., 0.), p(1., 0.), p(0., 2.)]),
            Ok(SlopeCheck::Distinct)
        );
        assert_eq!(
            slope_distinctness_check(&[p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)]),
            Ok(SlopeCheck::Collision {
                first: (0, 1),
                second: (2, 3)
            })
        );
        assert!(matches!(
            slope_distinctness_check(&[p(0., 0.), p(1., 1.), p(2., 2.)]),
            Ok(SlopeCheck::Collision { .. })
        ));
        assert_eq!(
            slope_distinctness_check(&[p(0., 0.), p(1., 1.), p(0., 0.)]),
            Err(Error::DuplicatePoint(0, 2))
        );
    }

    #[test]
    fn near_horizontal_slopes_wrap() {
        // Slopes of +1e-12 and −1e-12 radians are parallel up to tolerance.
        let pts = [p(0., 0.), p(1., 1e-12), p(5., 7.), p(6., 7. - 1e-12)];
        assert!(matches!(
            slope_distinctness_check(&pts),
            Ok(SlopeCheck::Collision { .. })
        ));
    }
}
