//! Integer-difference candidates around a triangle and integer-distance checks.
//!
//! A point `p` whose distances to `s1, s2, s3` differ by integers is a
//! triple point of the weighted diagram with weights `(0, w2, w3)`,
//! `w_i = d(s1, p) − d(s_i, p)`. The triangle inequality limits the integer
//! weights, and each diagram has boundedly many triple points, so the
//! candidates are finite and countable.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{DistanceField, Metric};
use crate::point::Point;
use crate::triple::{check_triple, triple_cap, triple_points, SolverConfig};
use crate::voronoi::WeightedSite;

/// Distances within this of an integer count as integers.
pub const INTEGER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleSpec {
    pub field: DistanceField,
    pub s1: Point,
    pub s2: Point,
    pub s3: Point,
}

impl TriangleSpec {
    pub fn new(field: DistanceField, s1: Point, s2: Point, s3: Point) -> Result<TriangleSpec> {
        let t = TriangleSpec { field, s1, s2, s3 };
        t.validate()?;
        Ok(t)
    }

    pub fn euclidean(s1: Point, s2: Point, s3: Point) -> Result<TriangleSpec> {
        TriangleSpec::new(DistanceField::euclidean(), s1, s2, s3)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.field {
            DistanceField::NormPlane(n) if !n.is_strict() => return Err(Error::NonStrictNorm),
            DistanceField::Cone => return Err(Error::UnsupportedField),
            _ => {}
        }
        check_triple(&self.field, &self.sites([0.0, 0.0, 0.0]))
    }

    pub fn points(&self) -> [Point; 3] {
        [self.s1, self.s2, self.s3]
    }

    fn sites(&self, w: [f64; 3]) -> [WeightedSite; 3] {
        [
            WeightedSite::new(self.s1, w[0]),
            WeightedSite::new(self.s2, w[1]),
            WeightedSite::new(self.s3, w[2]),
        ]
    }

    pub fn distances_from(&self, p: Point) -> [f64; 3] {
        self.points().map(|s| self.field.dist(p, s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub w2: i64,
    pub w3: i64,
    pub x: f64,
    pub y: f64,
    pub d: [f64; 3],
}

impl Candidate {
    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }

    /// Largest distance from an integer over the three distances.
    pub fn integrality_gap(&self) -> f64 {
        self.d.iter().map(|d| (d - d.round()).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub triangle: TriangleSpec,
    pub bound: u64,
    pub candidates: Vec<Candidate>,
    pub integer_points: Vec<Candidate>,
    pub weight_pairs_swept: u64,
    pub diameter: f64,
}

impl EnumerationReport {
    pub fn slack(&self) -> u64 {
        self.bound.saturating_sub(self.candidates.len() as u64)
    }

    pub fn within_bound(&self) -> bool {
        self.candidates.len() as u64 <= self.bound
    }
}

/// `2·(2⌊d12⌋+1)·(2⌊d13⌋+1)`.
pub fn candidate_bound(d12: f64, d13: f64) -> Result<u64> {
    for d in [d12, d13] {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NonPositiveDistance(d));
        }
    }
    Ok(2 * weight_range(d12) * weight_range(d13))
}

/// Number of integers `w` with `|w| <= d`.
fn weight_range(d: f64) -> u64 {
    2 * d.floor() as u64 + 1
}

/// Sweep the integer weight pairs and collect every triple point.
pub fn enumerate_candidates(
    triangle: &TriangleSpec,
    solver: &SolverConfig,
) -> Result<EnumerationReport> {
    triangle.validate()?;
    let field = &triangle.field;
    let [s1, s2, s3] = triangle.points();
    let (d12, d13, d23) = (field.dist(s1, s2), field.dist(s1, s3), field.dist(s2, s3));
    let bound = match field {
        DistanceField::Torus(_) => {
            let cap = triple_cap(field).expect("tori have a cap") as u64;
            cap * weight_range(d12) * weight_range(d13)
        }
        _ => candidate_bound(d12, d13)?,
    };
    let (m2, m3) = (d12.floor() as i64, d13.floor() as i64);
    let pairs: Vec<(i64, i64)> = (-m2..=m2)
        .flat_map(|w2| (-m3..=m3).map(move |w3| (w2, w3)))
        .collect();

    let per_pair: Vec<Result<Vec<Candidate>>> = pairs
        .par_iter()
        .map(|&(w2, w3)| {
            let sites = triangle.sites([0.0, w2 as f64, w3 as f64]);
            let set = triple_points(field, &sites, solver)?;
            Ok(set
                .points
                .into_iter()
                .map(|p| Candidate {
                    w2,
                    w3,
                    x: p.x,
                    y: p.y,
                    d: triangle.distances_from(p),
                })
                .collect())
        })
        .collect();

    let mut candidates = Vec::new();
    for r in per_pair {
        candidates.extend(r?);
    }
    candidates.sort_by(|a, b| {
        (a.w2, a.w3)
            .cmp(&(b.w2, b.w3))
            .then(a.x.total_cmp(&b.x))
            .then(a.y.total_cmp(&b.y))
    });
    let integer_points = candidates
        .iter()
        .filter(|c| c.integrality_gap() <= INTEGER_TOL)
        .cloned()
        .collect();
    Ok(EnumerationReport {
        triangle: triangle.clone(),
        bound,
        candidates,
        integer_points,
        weight_pairs_swept: pairs.len() as u64,
        diameter: d12.max(d13).max(d23),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegerDistanceCheck {
    pub ok: bool,
    pub matrix: Vec<Vec<f64>>,
    pub worst: f64,
}

/// Pairwise distances and how far the worst one is from a positive integer.
pub fn verify_integer_distances(
    field: &DistanceField,
    points: &[Point],
    tol: f64,
) -> Result<IntegerDistanceCheck> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("need at least two points".into()));
    }
    let n = points.len();
    let mut matrix = vec![vec![0.0; n]; n];
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = field.dist(points[i], points[j]);
            matrix[i][j] = d;
            matrix[j][i] = d;
            let nearest = d.round().max(1.0);
            worst = worst.max((d - nearest).abs());
        }
    }
    Ok(IntegerDistanceCheck {
        ok: worst <= tol,
        matrix,
        worst,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub n: usize,
    pub diameter: f64,
    pub ratio: f64,
}

/// `n / max(D, 1)` for an integer-distance set.
pub fn check_diameter_bound(field: &DistanceField, points: &[Point]) -> Result<DiameterReport> {
    let check = verify_integer_distances(field, points, INTEGER_TOL)?;
    if !check.ok {
        return Err(Error::NotIntegerDistanceSet { worst: check.worst });
    }
    let diameter = check
        .matrix
        .iter()
        .flatten()
        .copied()
        .fold(0.0, f64::max);
    Ok(DiameterReport {
        n: points.len(),
        diameter,
        ratio: points.len() as f64 / diameter.max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::NormSpec;
    use crate::surface::hexagonal_torus;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn bound_examples() {
        assert_eq!(candidate_bound(3.0, 4.0), Ok(126));
        assert_eq!(candidate_bound(0.5, 0.5), Ok(2));
        assert_eq!(candidate_bound(1.0, 2.0), Ok(30));
        assert_eq!(candidate_bound(0.0, 2.0), Err(Error::NonPositiveDistance(0.0)));
    }

    #[test]
    fn integer_distance_examples() {
        let l1 = DistanceField::NormPlane(NormSpec::l1());
        let grid: Vec<Point> = (0..4)
            .flat_map(|i| (0..4).map(move |j| p(i as f64, j as f64)))
            .collect();
        let r = verify_integer_distances(&l1, &grid, 0.0).unwrap();
        assert!(r.ok);
        assert_eq!(r.worst, 0.0);

        let e = DistanceField::euclidean();
        assert!(verify_integer_distances(&e, &[p(0., 0.), p(3., 0.), p(0., 4.)], 1e-12)
            .unwrap()
            .ok);
        assert!(!verify_integer_distances(&e, &[p(0., 0.), p(1., 0.), p(0.5, 0.5)], 1e-6)
            .unwrap()
            .ok);
        // Coincident points are not at a positive integer distance.
        assert!(!verify_integer_distances(&e, &[p(0., 0.), p(0., 0.)], 0.5).unwrap().ok);
    }

    #[test]
    fn diameter_examples() {
        let e = DistanceField::euclidean();
        let line: Vec<Point> = (0..=10).map(|i| p(i as f64, 0.0)).collect();
        let r = check_diameter_bound(&e, &line).unwrap();
        assert_eq!((r.n, r.diameter), (11, 10.0));
        assert!((r.ratio - 1.1).abs() < 1e-15);
        let r = check_diameter_bound(&e, &[p(0., 0.), p(7., 0.)]).unwrap();
        assert_eq!((r.n, r.diameter), (2, 7.0));
        assert!(matches!(
            check_diameter_bound(&e, &[p(0., 0.), p(0.5, 0.)]),
            Err(Error::NotIntegerDistanceSet { .. })
        ));
    }

    #[test]
    fn triangle_validation() {
        assert_eq!(
            TriangleSpec::euclidean(p(0., 0.), p(1., 0.), p(2., 0.)),
            Err(Error::CollinearSites)
        );
        assert_eq!(
            TriangleSpec::new(
                DistanceField::NormPlane(NormSpec::linf()),
                p(0., 0.),
                p(1., 0.),
                p(0., 1.)
            ),
            Err(Error::NonStrictNorm)
        );
    }

    #[test]
    fn candidates_respect_their_weights() {
        let t = TriangleSpec::euclidean(p(0., 0.), p(2., 0.), p(0.5, 1.5)).unwrap();
        let r = enumerate_candidates(&t, &SolverConfig::default()).unwrap();
        assert!(r.within_bound());
        assert_eq!(r.weight_pairs_swept, 5 * 3);
        for c in &r.candidates {
            assert!((c.d[0] - c.d[1] - c.w2 as f64).abs() < 1e-6);
            assert!((c.d[0] - c.d[2] - c.w3 as f64).abs() < 1e-6);
        }
        for w in r.candidates.windows(2) {
            assert!((w[0].w2, w[0].w3) <= (w[1].w2, w[1].w3));
        }
    }

    #[test]
    fn hexagonal_torus_sweeps_one_pair() {
        let hex = hexagonal_torus(0.9).unwrap();
        let t = TriangleSpec::new(
            DistanceField::Torus(hex.torus),
            hex.center,
            hex.vclass1,
            hex.vclass2,
        )
        .unwrap();
        let r = enumerate_candidates(&t, &SolverConfig::default()).unwrap();
        assert_eq!(r.weight_pairs_swept, 1);
        assert_eq!(r.bound, 6);
        assert_eq!(r.candidates.len(), 6);
        assert!(r.integer_points.is_empty());
    }
}
