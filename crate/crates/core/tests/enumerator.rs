mod common;

use anning_core::enumerate::{candidate_bound, enumerate_candidates, TriangleSpec};
use anning_core::oracle::{oracle_region, oracle_triple_points, ExclusionConfig};
use anning_core::{DistanceField, NormSpec, Point, SolverConfig, WeightedSite};
use common::exact_345_points;

#[test]
fn exact_oracle_sanity() {
    let pts = exact_345_points(200);
    for want in [(0.0, 0.0), (3.0, 0.0), (0.0, 4.0), (-3.0, 0.0), (0.0, -4.0)] {
        assert!(pts.iter().any(|p| p.2 == want), "missing {want:?}");
    }
}

#[test]
fn euclidean_345_matches_exact_oracle() {
    let t = TriangleSpec::euclidean(
        Point::new(0.0, 0.0),
        Point::new(3.0, 0.0),
        Point::new(0.0, 4.0),
    )
    .unwrap();
    let report = enumerate_candidates(&t, &SolverConfig::default()).unwrap();
    assert_eq!(report.bound, 126);
    assert_eq!(report.bound, candidate_bound(3.0, 4.0).unwrap());
    assert!(report.candidates.len() as u64 <= report.bound);

    let mut oracle = exact_345_points(100_000);
    oracle.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2 .0.total_cmp(&b.2 .0)));
    let found: Vec<(i64, i64, Point)> = report
        .integer_points
        .iter()
        .map(|c| (c.w2, c.w3, c.point()))
        .collect();
    assert_eq!(found.len(), oracle.len(), "found {found:?}\noracle {oracle:?}");
    for (o, f) in oracle.iter().zip(&found) {
        assert_eq!((o.0 as i64, o.1 as i64), (f.0, f.1));
        assert!((Point::new(o.2 .0, o.2 .1) - f.2).length() < 1e-6, "{o:?} vs {f:?}");
    }
}

/// Oracle for a general triangle: independent ray sweep per weight pair.
fn sweep_integer_points(t: &TriangleSpec) -> Vec<Point> {
    let solver = SolverConfig::default();
    let [s1, s2, s3] = t.points();
    let m2 = t.field.norm().unwrap().distance(s1, s2).floor() as i64;
    let m3 = t.field.norm().unwrap().distance(s1, s3).floor() as i64;
    let mut out = Vec::new();
    for w2 in -m2..=m2 {
        for w3 in -m3..=m3 {
            let sites = [
                WeightedSite::new(s1, 0.0),
                WeightedSite::new(s2, w2 as f64),
                WeightedSite::new(s3, w3 as f64),
            ];
            let region = oracle_region(&t.field, &sites, &solver);
            // Degenerate pairs make whole rays of roots; those weight pairs
            // are checked separately.
            let Ok(pts) =
                oracle_triple_points(&t.field, &sites, region, 1e-5, &ExclusionConfig::default())
            else {
                continue;
            };
            for p in pts {
                let d = t.distances_from(p);
                if d.iter().all(|d| (d - d.round()).abs() < 1e-6) {
                    out.push(p);
                }
            }
        }
    }
    out
}

#[test]
fn random_lp_triangles_match_sweep_oracle() {
    // Fixed triangles with diameter below 5 and no boundary weight pairs.
    let cases = [
        (3.3, [(0.0, 0.0), (2.5, 0.4), (0.7, 2.9)]),
        (1.7, [(0.1, -0.3), (3.1, 0.9), (-0.6, 2.2)]),
    ];
    for (pexp, pts) in cases {
        let field = DistanceField::NormPlane(NormSpec::lp(pexp).unwrap());
        let [a, b, c] = pts.map(|(x, y)| Point::new(x, y));
        let t = TriangleSpec::new(field, a, b, c).unwrap();
        let report = enumerate_candidates(&t, &SolverConfig::default()).unwrap();
        assert!(report.within_bound());
        let mut oracle = sweep_integer_points(&t);
        oracle.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        let mut found: Vec<Point> = report.integer_points.iter().map(|c| c.point()).collect();
        found.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        assert_eq!(found.len(), oracle.len(), "p={pexp}: {found:?} vs {oracle:?}");
        for (f, o) in found.iter().zip(&oracle) {
            assert!((*f - *o).length() < 1e-4);
        }
    }
}
