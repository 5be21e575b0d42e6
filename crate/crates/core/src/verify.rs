//! Seeded property suites, shared by the `verify` command and the tests.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::constructions::{
    grid_set, norm_for_integer_distances, pythagorean_circle_set, PythagoreanTriple,
};
use crate::enumerate::{check_diameter_bound, verify_integer_distances};
use crate::error::{Error, Result};
use crate::field::{DistanceField, Metric};
use crate::norm::{ArcBody, NormSpec};
use crate::oracle::{oracle_region, oracle_triple_points, ExclusionConfig};
use crate::point::{is_collinear, Point};
use crate::surface::{cone_equilateral_set, hexagonal_torus, FlatTorus, InfiniteCone};
use crate::triple::{triple_points, SolverConfig};
use crate::voronoi::{Diagram, SiteClass, WeightedSite, OWNER_TOL};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }
}

/// Tally for one property.
struct Tally {
    name: &'static str,
    checked: usize,
    failures: usize,
    first_failure: Option<String>,
}

impl Tally {
    fn new(name: &'static str) -> Tally {
        Tally {
            name,
            checked: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn finish(self) -> PropertyResult {
        let passed = self.failures == 0 && self.checked > 0;
        let detail = match self.first_failure {
            Some(f) => format!("first failure: {f}"),
            None if self.checked == 0 => "nothing checked".into(),
            None => String::new(),
        };
        PropertyResult {
            name: self.name.into(),
            passed,
            checked: self.checked,
            failures: self.failures,
            detail,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Star,
    Lipschitz,
    NonOverlap,
    TripleCap,
    TorusCap,
    Cone,
    Constructions,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Star,
        Suite::Lipschitz,
        Suite::NonOverlap,
        Suite::TripleCap,
        Suite::TorusCap,
        Suite::Cone,
        Suite::Constructions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Star => "star",
            Suite::Lipschitz => "lipschitz",
            Suite::NonOverlap => "non-overlap",
            Suite::TripleCap => "triple-cap",
            Suite::TorusCap => "torus-cap",
            Suite::Cone => "cone",
            Suite::Constructions => "constructions",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite '{s}'")))
    }
}

/// Sample sizes of the suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteSizes {
    pub star_diagrams: usize,
    pub star_points: usize,
    pub star_steps: usize,
    pub lipschitz_triples: usize,
    pub overlap_diagrams: usize,
    pub overlap_points: usize,
    pub triple_instances: usize,
    pub triple_oracle_checks: usize,
    pub torus_instances: usize,
    pub cone_samples: usize,
}

impl Default for SuiteSizes {
    fn default() -> Self {
        SuiteSizes {
            star_diagrams: 200,
            star_points: 10,
            star_steps: 50,
            lipschitz_triples: 10_000,
            overlap_diagrams: 200,
            overlap_points: 50,
            triple_instances: 1000,
            triple_oracle_checks: 50,
            torus_instances: 200,
            cone_samples: 10_000,
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    run_suite_with(suite, seed, &SuiteSizes::default())
}

pub fn run_suite_with(suite: Suite, seed: u64, sizes: &SuiteSizes) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let properties = match suite {
        Suite::Star => star(&mut rng, sizes),
        Suite::Lipschitz => lipschitz(&mut rng, sizes),
        Suite::NonOverlap => non_overlap(&mut rng, sizes),
        Suite::TripleCap => triple_cap(&mut rng, sizes),
        Suite::TorusCap => torus_cap(&mut rng, sizes),
        Suite::Cone => cone(&mut rng, sizes),
        Suite::Constructions => constructions(),
    };
    SuiteReport {
        suite: suite.name().into(),
        seed,
        properties,
    }
}

fn random_point(rng: &mut ChaCha8Rng, half: f64) -> Point {
    Point::new(rng.random_range(-half..half), rng.random_range(-half..half))
}

/// A strictly convex norm: mostly `L_p`, sometimes an arc body.
pub fn random_strict_norm(rng: &mut ChaCha8Rng) -> NormSpec {
    if rng.random_bool(0.8) {
        NormSpec::lp(rng.random_range(1.2..8.0)).expect("exponent in range")
    } else {
        let m = rng.random_range(2..6);
        let radius = rng.random_range(3.0..12.0);
        NormSpec::arcs(ArcBody::rounded_polygon(m, radius).expect("valid rounded polygon"))
    }
}

fn random_diagram(rng: &mut ChaCha8Rng, norm: NormSpec) -> Diagram {
    loop {
        let k = rng.random_range(2..=5);
        let sites = (0..k)
            .map(|_| WeightedSite::new(random_point(rng, 5.0), rng.random_range(-3.0..3.0)))
            .collect();
        if let Ok(d) = Diagram::new(DistanceField::NormPlane(norm.clone()), sites) {
            return d;
        }
    }
}

fn star(rng: &mut ChaCha8Rng, sizes: &SuiteSizes) -> Vec<PropertyResult> {
    let mut t = Tally::new("segment to own site stays in cell");
    for _ in 0..sizes.star_diagrams {
        let norm = random_strict_norm(rng);
        let diagram = random_diagram(rng, norm);
        for _ in 0..sizes.star_points {
            let p = random_point(rng, 8.0);
            for i in diagram.owner(p, OWNER_TOL) {
                let s = diagram.sites()[i].point;
                for m in 1..=sizes.star_steps {
                    let q = p.lerp(s, m as f64 / (sizes.star_steps + 1) as f64);
                    t.check(diagram.owner(q, OWNER_TOL).contains(&i), || {
                        format!("site {i} lost ownership at {q:?} on segment from {p:?}")
                    });
                }
            }
        }
    }
    vec![t.finish()]
}

fn lipschitz(rng: &mut ChaCha8Rng, sizes: &SuiteSizes) -> Vec<PropertyResult> {
    let hex = hexagonal_torus(1.0).expect("positive radius");
    let fields: Vec<(&'static str, DistanceField)> = vec![
        ("strict norm", DistanceField::NormPlane(NormSpec::lp(3.0).expect("valid"))),
        ("arc norm", DistanceField::NormPlane(NormSpec::arcs(ArcBody::rounded_polygon(3, 4.0).expect("valid")))),
        ("l1", DistanceField::NormPlane(NormSpec::l1())),
        ("square torus", DistanceField::Torus(FlatTorus::square(1.0).expect("valid"))),
        ("hexagonal torus", DistanceField::Torus(hex.torus)),
        ("cone", DistanceField::Cone),
    ];
    let mut bound = Tally::new("|d(p,q) - d(p,r)| <= d(q,r)");
    let mut equality = Tally::new("equality along segments of strict norms");
    let per_field = sizes.lipschitz_triples / fields.len();
    for (name, field) in &fields {
        let sample = |rng: &mut ChaCha8Rng| match field {
            DistanceField::Cone => Point::new(rng.random_range(0.01..3.0), rng.random_range(-10.0..10.0)),
            _ => random_point(rng, 4.0),
        };
        for _ in 0..per_field {
            let (p, q, r) = (sample(rng), sample(rng), sample(rng));
            let diff = field.dist(p, q) - field.dist(p, r);
            let ell = field.dist(q, r);
            let tol = 1e-12 * (1.0 + field.dist(p, q) + field.dist(p, r));
            bound.check(diff.abs() <= ell + tol, || {
                format!("{name}: p={p:?} q={q:?} r={r:?} diff={diff} ell={ell}")
            });
            if field.is_strict_plane() {
                // q on the segment from p to r: d(p,q) - d(p,r) = -d(q,r).
                let q = p.lerp(r, rng.random_range(0.0..1.0));
                let diff = field.dist(p, q) - field.dist(p, r);
                equality.check((diff + field.dist(q, r)).abs() <= 1e-12 * (1.0 + field.dist(p, r)), || {
                    format!("{name}: p={p:?} q={q:?} r={r:?}")
                });
            }
        }
    }
    vec![bound.finish(), equality.finish()]
}

fn non_overlap(rng: &mut ChaCha8Rng, sizes: &SuiteSizes) -> Vec<PropertyResult> {
    let mut single = Tally::new("points deep in a cell have one owner");
    let mut interior = Tally::new("neighborhoods of such points stay in the cell");
    let mut built = 0;
    while built < sizes.overlap_diagrams {
        let norm = random_strict_norm(rng);
        let lipschitz = 1.0 / norm.inradius_bound();
        let diagram = random_diagram(rng, norm);
        let classes = diagram.classify_sites(OWNER_TOL).expect("strict plane");
        if classes.iter().any(|c| *c != SiteClass::NonDegenerate) {
            continue;
        }
        built += 1;
        for _ in 0..sizes.overlap_points {
            let p = random_point(rng, 8.0);
            let (i, gap) = diagram.ownership_gap(p);
            if gap <= 10.0 * OWNER_TOL {
                continue;
            }
            single.check(diagram.owner(p, OWNER_TOL) == [i], || format!("{p:?} has several owners"));
            // Weighted distances move by at most `lipschitz` per unit, so a
            // disk of radius gap / (4·lipschitz) keeps `i` strictly best.
            let r = gap / (4.0 * lipschitz);
            let ok = (0..16).all(|k| {
                let q = p + Point::from_angle(std::f64::consts::TAU * k as f64 / 16.0) * r;
                diagram.owner(q, OWNER_TOL) == [i]
            });
            interior.check(ok, || format!("disk of radius {r} around {p:?} leaves cell {i}"));
        }
    }
    vec![single.finish(), interior.finish()]
}

/// Three sites on a strict plane with weights in the open triangle range.
pub fn random_planar_triple(rng: &mut ChaCha8Rng) -> (DistanceField, [WeightedSite; 3]) {
    let norm = NormSpec::lp(rng.random_range(1.2..8.0)).expect("exponent in range");
    let pts = loop {
        let v = [random_point(rng, 5.0), random_point(rng, 5.0), random_point(rng, 5.0)];
        if !is_collinear(v[0], v[1], v[2]) {
            break v;
        }
    };
    let d = |i: usize, j: usize| norm.distance(pts[i], pts[j]);
    let (w2, w3) = loop {
        let w2 = rng.random_range(-d(0, 1)..d(0, 1));
        let w3 = rng.random_range(-d(0, 2)..d(0, 2));
        if (w2 - w3).abs() < d(1, 2) {
            break (w2, w3);
        }
    };
    let sites = [
        WeightedSite::new(pts[0], 0.0),
        WeightedSite::new(pts[1], w2),
        WeightedSite::new(pts[2], w3),
    ];
    (DistanceField::NormPlane(norm), sites)
}

fn triple_cap(rng: &mut ChaCha8Rng, sizes: &SuiteSizes) -> Vec<PropertyResult> {
    let solver = SolverConfig::default();
    let mut cap = Tally::new("at most two triple points");
    let mut count = Tally::new("oracle count agreement");
    let mut location = Tally::new("oracle location agreement (1e-6)");
    let every = (sizes.triple_instances / sizes.triple_oracle_checks.max(1)).max(1);
    for k in 0..sizes.triple_instances {
        let (field, sites) = random_planar_triple(rng);
        let found = triple_points(&field, &sites, &solver);
        cap.check(found.as_ref().is_ok_and(|r| r.len() <= 2), || {
            format!("instance {k}: {found:?} for {sites:?}")
        });
        let Ok(found) = found else { continue };
        if k % every != 0 || count.checked >= sizes.triple_oracle_checks {
            continue;
        }
        let region = oracle_region(&field, &sites, &solver);
        let oracle = oracle_triple_points(
            &field,
            &sites,
            region,
            solver.dedup_radius,
            &ExclusionConfig::default(),
        );
        let Ok(oracle) = oracle else {
            count.check(false, || format!("instance {k}: oracle failed"));
            continue;
        };
        count.check(oracle.len() == found.len(), || {
            format!("instance {k}: solver {:?}, oracle {oracle:?}", found.points)
        });
        for o in &oracle {
            location.check(found.points.iter().any(|p| (*p - *o).length() < 1e-6), || {
                format!("instance {k}: oracle point {o:?} unmatched in {:?}", found.points)
            });
        }
    }
    vec![cap.finish(), count.finish(), location.finish()]
}

fn torus_cap(rng: &mut ChaCha8Rng, sizes: &SuiteSizes) -> Vec<PropertyResult> {
    let solver = SolverConfig::default();
    let hex = hexagonal_torus(1.0).expect("positive radius");
    let tori = [FlatTorus::square(1.0).expect("valid"), hex.torus];
    let mut cap = Tally::new("at most six triple points");
    let mut hit = Tally::new("hexagonal torus reaches six");
    for k in 0..sizes.torus_instances {
        let torus = tori[k % 2];
        let field = DistanceField::Torus(torus);
        let sites = loop {
            let s = [0, 1, 2].map(|_| {
                let p = torus.from_coefficients(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
                WeightedSite::new(p, rng.random_range(-0.2..0.2))
            });
            let far = |i: usize, j: usize| field.dist(s[i].point, s[j].point) > 1e-3;
            if far(0, 1) && far(0, 2) && far(1, 2) {
                break s;
            }
        };
        let found = triple_points(&field, &sites, &solver);
        cap.check(found.as_ref().is_ok_and(|r| r.len() <= 6), || {
            format!("instance {k}: {found:?} for {sites:?}")
        });
    }
    let sites = [hex.center, hex.vclass1, hex.vclass2].map(|p| WeightedSite::new(p, 0.0));
    let found = triple_points(&DistanceField::Torus(hex.torus), &sites, &solver);
    hit.check(found.as_ref().is_ok_and(|r| r.len() == 6), || format!("{found:?}"));
    vec![cap.finish(), hit.finish()]
}

fn cone(rng: &mut ChaCha8Rng, sizes: &SuiteSizes) -> Vec<PropertyResult> {
    let mut unit = Tally::new("equilateral set at unit distance");
    let pts = cone_equilateral_set(10).expect("k >= 2");
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = InfiniteCone.distance_unchecked(pts[i], pts[j]);
            unit.check((d - 1.0).abs() <= 1e-12, || format!("{i}-{j}: {d}"));
        }
    }
    let mut tri = Tally::new("triangle inequality");
    let sample = |rng: &mut ChaCha8Rng| Point::new(rng.random_range(0.01..3.0), rng.random_range(-12.0..12.0));
    for _ in 0..sizes.cone_samples {
        let (p, q, r) = (sample(rng), sample(rng), sample(rng));
        let c = DistanceField::Cone;
        let (pq, qr, pr) = (c.dist(p, q), c.dist(q, r), c.dist(p, r));
        tri.check(pr <= pq + qr + 1e-12 * (1.0 + pr), || format!("{p:?} {q:?} {r:?}"));
    }
    let mut seam = Tally::new("continuity across the seam");
    for _ in 0..100 {
        let (r1, r2) = (rng.random_range(0.01..3.0), rng.random_range(0.01..3.0));
        let t = rng.random_range(-5.0..5.0);
        let p = Point::new(r1, t);
        let inside = DistanceField::Cone.dist(p, Point::new(r2, t + std::f64::consts::PI * (1.0 - 1e-15)));
        seam.check((inside - (r1 + r2)).abs() <= 1e-12 * (1.0 + r1 + r2), || format!("{r1} {r2}"));
    }
    vec![unit.finish(), tri.finish(), seam.finish()]
}

/// Every integer-distance set the constructions produce, with its field.
pub fn construction_sets(seed: u64) -> Result<Vec<(String, DistanceField, Vec<Point>)>> {
    let mut out = Vec::new();
    for (a, b, c) in [(3, 4, 5), (5, 12, 13)] {
        let t = PythagoreanTriple::new(a, b, c)?;
        for n in 2..=6 {
            for center in [false, true] {
                let set = pythagorean_circle_set(t, n, center)?;
                out.push((
                    format!("pythagorean ({a},{b},{c}) n={n} center={center}"),
                    DistanceField::euclidean(),
                    set.to_points(true),
                ));
            }
        }
    }
    for n in 2..=5 {
        for (name, norm) in [("l1", NormSpec::l1()), ("linf", NormSpec::linf())] {
            out.push((format!("grid {n} {name}"), DistanceField::NormPlane(norm), grid_set(n)?));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random4: Vec<Point> = (0..4)
        .map(|_| Point::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)))
        .collect();
    for (name, pts) in [
        ("norm for triple", vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 2.0)]),
        ("norm for random 4", random4),
    ] {
        let built = norm_for_integer_distances(&pts)?;
        out.push((name.into(), DistanceField::NormPlane(built.norm), built.scaled_points));
    }
    Ok(out)
}

/// Seed of the random point set handed to the norm construction.
pub const CONSTRUCTION_SEED: u64 = 42;

fn constructions() -> Vec<PropertyResult> {
    let mut exact = Tally::new("pythagorean sets exact");
    for (a, b, c) in [(3, 4, 5), (5, 12, 13), (8, 15, 17)] {
        let t = PythagoreanTriple::new(a, b, c).expect("valid triple");
        for n in 2..=6 {
            let ok = pythagorean_circle_set(t, n, true).is_ok_and(|s| s.verify_integer_distances_exact());
            exact.check(ok, || format!("({a},{b},{c}) n={n}"));
        }
    }
    let mut integer = Tally::new("integer distances");
    let mut ratio = Tally::new("n <= 10 max(D, 1)");
    match construction_sets(CONSTRUCTION_SEED) {
        Ok(sets) => {
            for (name, field, pts) in sets {
                let ok = verify_integer_distances(&field, &pts, 1e-6).is_ok_and(|c| c.ok);
                integer.check(ok, || name.clone());
                let r = check_diameter_bound(&field, &pts);
                ratio.check(
                    r.as_ref().is_ok_and(|r| r.n as f64 <= 10.0 * r.diameter.max(1.0)),
                    || format!("{name}: {r:?}"),
                );
            }
        }
        Err(e) => integer.check(false, || format!("construction failed: {e}")),
    }
    vec![exact.finish(), integer.finish(), ratio.finish()]
}
