//! Points whose weighted distances to three sites all agree.
//!
//! With exactly three sites these are the points of `V_1 ∩ V_2 ∩ V_3`: any
//! common value is automatically the minimum. The solver looks for roots of
//! `g(p) = (D_1 − D_2, D_1 − D_3)`, `D_i = d(p, s_i) + w_i`, by seeding
//! damped Newton iterations from every grid cell in which both components
//! change sign.
//!
//! On strictly convex planes a site pair with `|w_i − w_j| = d(s_i, s_j)`
//! has a ray as its bisector (the site with the larger weight is degenerate).
//! Those instances are solved in one dimension along the ray, since `g` has
//! no sign change across it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{DistanceField, Metric};
use crate::point::{is_collinear, Point, Rect};
use crate::surface::max_equidistant_bound;
use crate::voronoi::WeightedSite;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Cells per side of each seeding grid.
    pub grid: usize,
    /// Central-difference step, relative to the instance length scale.
    pub fd_step: f64,
    /// Roots closer than this are merged.
    pub dedup_radius: f64,
    /// Largest accepted disagreement between weighted distances.
    pub residual_tol: f64,
    /// Half-width of the innermost planar search box, in units of
    /// (largest pairwise site distance + largest |weight|).
    pub margin_factor: f64,
    /// Number of nested planar search boxes, each 8 times wider. One extra
    /// box, 8 times narrower than the first, refines the seeding near the
    /// sites.
    pub scales: usize,
    pub max_newton_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grid: 64,
            fd_step: 1e-6,
            dedup_radius: 1e-5,
            residual_tol: 1e-9,
            margin_factor: 4.0,
            scales: 3,
            max_newton_iter: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SolverStats {
    pub seeds_tried: usize,
    pub newton_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriplePointSet {
    pub points: Vec<Point>,
    pub residuals: Vec<f64>,
    pub solver_stats: SolverStats,
}

impl TriplePointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Equation system for one triple of weighted sites.
#[derive(Debug, Clone, Copy)]
pub struct TripleSystem<'a> {
    pub field: &'a DistanceField,
    pub sites: &'a [WeightedSite; 3],
}

impl TripleSystem<'_> {
    #[inline]
    pub fn weighted(&self, p: Point) -> [f64; 3] {
        let s = self.sites;
        [
            self.field.dist(p, s[0].point) + s[0].weight,
            self.field.dist(p, s[1].point) + s[1].weight,
            self.field.dist(p, s[2].point) + s[2].weight,
        ]
    }

    #[inline]
    pub fn g(&self, p: Point) -> [f64; 2] {
        let d = self.weighted(p);
        [d[0] - d[1], d[0] - d[2]]
    }

    /// Largest pairwise disagreement of the weighted distances.
    pub fn residual(&self, p: Point) -> f64 {
        let d = self.weighted(p);
        (d[0] - d[1]).abs().max((d[0] - d[2]).abs()).max((d[1] - d[2]).abs())
    }

    /// Largest pairwise site distance.
    pub fn diameter(&self) -> f64 {
        let s = self.sites;
        let d = |i: usize, j: usize| self.field.dist(s[i].point, s[j].point);
        d(0, 1).max(d(0, 2)).max(d(1, 2))
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.sites.iter().map(|s| s.weight.abs()).fold(0.0, f64::max)
    }

    /// The outermost planar search box; roots outside it are not reported.
    pub fn planar_region(&self, config: &SolverConfig) -> Rect {
        *self.search_boxes(config).last().expect("at least one box")
    }

    /// Nested planar search boxes around the site centroid.
    pub fn search_boxes(&self, config: &SolverConfig) -> Vec<Rect> {
        let s = self.sites;
        let centroid = (s[0].point + s[1].point + s[2].point) * (1.0 / 3.0);
        let base = config.margin_factor * (self.diameter() + self.max_abs_weight());
        (-1..config.scales.max(1) as i32)
            .map(|k| Rect::centered(centroid, base * 8f64.powi(k)))
            .collect()
    }
}

/// Validate three sites for [`triple_points`] on `field`.
pub fn check_triple(field: &DistanceField, sites: &[WeightedSite; 3]) -> Result<()> {
    for s in sites {
        field.check_point(s.point)?;
        if !s.weight.is_finite() {
            return Err(Error::InvalidInput(format!("weight {} is not finite", s.weight)));
        }
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if field.dist(sites[i].point, sites[j].point) <= crate::voronoi::MIN_SITE_SEPARATION {
            return Err(Error::DuplicatePoint(i, j));
        }
    }
    if let DistanceField::NormPlane(spec) = field {
        if !spec.is_strict() {
            return Err(Error::NonStrictNorm);
        }
        if is_collinear(sites[0].point, sites[1].point, sites[2].point) {
            return Err(Error::CollinearSites);
        }
    }
    Ok(())
}

/// The most triple points the theory allows on `field`, if it caps them.
pub fn triple_cap(field: &DistanceField) -> Option<usize> {
    match field {
        DistanceField::NormPlane(_) | DistanceField::Torus(_) => {
            Some(max_equidistant_bound(field.euler_genus()).expect("genus >= 0") as usize)
        }
        DistanceField::Cone => None,
    }
}

/// Find every point with equal weighted distance to the three sites.
pub fn triple_points(
    field: &DistanceField,
    sites: &[WeightedSite; 3],
    config: &SolverConfig,
) -> Result<TriplePointSet> {
    check_triple(field, sites)?;
    let sys = TripleSystem { field, sites };
    let scale = sys.diameter().max(1e-300);

    let (candidates, stats) = match field {
        DistanceField::NormPlane(_) => match degenerate_pairs(&sys)? {
            PairState::Empty => (Vec::new(), SolverStats::default()),
            PairState::Ray {
                apex,
                other,
                direction,
            } => solve_on_ray(&sys, apex, other, direction, config),
            PairState::Regular => {
                let regions: Vec<Region> = sys
                    .search_boxes(config)
                    .into_iter()
                    .map(Region::from_rect)
                    .collect();
                solve_grid(&sys, &regions, scale, config)
            }
        },
        DistanceField::Torus(t) => {
            let region = Region {
                origin: Point::ORIGIN,
                e1: t.u(),
                e2: t.v(),
            };
            solve_grid(&sys, &[region], scale, config)
        }
        DistanceField::Cone => {
            let region = cone_region(sites);
            solve_grid(&sys, &[Region::from_rect(region)], scale, config)
        }
    };

    // Roots are only trusted inside the searched region: far outside it
    // cancellation makes residuals meaningless.
    let admissible = |p: Point| match field {
        DistanceField::NormPlane(_) => sys.planar_region(config).contains(p),
        DistanceField::Torus(_) => true,
        DistanceField::Cone => {
            let r = cone_region(sites);
            Rect::new(r.min, Point::new(2.0 * r.max.x, r.max.y)).contains(p)
        }
    };
    let mut accepted: Vec<(Point, f64)> = candidates
        .into_iter()
        .filter(|p| p.is_finite() && field.check_point(*p).is_ok() && admissible(*p))
        .map(|p| field.canonical(p))
        .map(|p| (p, sys.residual(p)))
        .filter(|&(_, r)| r < config.residual_tol)
        .collect();
    accepted.sort_by(|a, b| a.0.x.total_cmp(&b.0.x).then(a.0.y.total_cmp(&b.0.y)));

    let mut kept: Vec<(Point, f64)> = Vec::new();
    for (p, r) in accepted {
        match kept
            .iter_mut()
            .find(|(q, _)| field.dist(*q, p) < config.dedup_radius)
        {
            Some(slot) => {
                if r < slot.1 {
                    *slot = (p, r);
                }
            }
            None => kept.push((p, r)),
        }
    }

    if let Some(cap) = triple_cap(field) {
        if kept.len() > cap {
            return Err(Error::CapExceeded {
                found: kept.len(),
                cap,
            });
        }
    }
    Ok(TriplePointSet {
        points: kept.iter().map(|k| k.0).collect(),
        residuals: kept.iter().map(|k| k.1).collect(),
        solver_stats: stats,
    })
}

enum PairState {
    Regular,
    /// Some bisector is empty, so no point is equidistant from all three.
    Empty,
    /// Sites `apex` and `lo` are balanced exactly on the ray from
    /// `sites[apex]` along `direction`; `other` is the third site.
    Ray {
        apex: usize,
        other: usize,
        direction: Point,
    },
}

fn degenerate_pairs(sys: &TripleSystem) -> Result<PairState> {
    let s = sys.sites;
    let mut ray = None;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let dij = sys.field.dist(s[i].point, s[j].point);
        let excess = (s[i].weight - s[j].weight).abs() - dij;
        let tol = 1e-12 * dij.max(1.0);
        if excess > tol {
            return Ok(PairState::Empty);
        }
        if excess >= -tol && ray.is_none() {
            let (hi, lo) = if s[i].weight > s[j].weight { (i, j) } else { (j, i) };
            ray = Some(PairState::Ray {
                apex: hi,
                other: 3 - i - j,
                direction: (s[hi].point - s[lo].point).normalized(),
            });
        }
    }
    Ok(ray.unwrap_or(PairState::Regular))
}

/// Parallelogram `origin + a·e1 + b·e2`, `a, b ∈ [0, 1]`.
#[derive(Debug, Clone, Copy)]
struct Region {
    origin: Point,
    e1: Point,
    e2: Point,
}

impl Region {
    fn from_rect(r: Rect) -> Region {
        Region {
            origin: r.min,
            e1: Point::new(r.width(), 0.0),
            e2: Point::new(0.0, r.height()),
        }
    }

    fn at(&self, a: f64, b: f64) -> Point {
        self.origin + self.e1 * a + self.e2 * b
    }
}

fn cone_region(sites: &[WeightedSite; 3]) -> Rect {
    let r_max = sites.iter().map(|s| s.point.x).fold(0.0, f64::max);
    let w_max = sites.iter().map(|s| s.weight.abs()).fold(0.0, f64::max);
    let t_min = sites.iter().map(|s| s.point.y).fold(f64::INFINITY, f64::min);
    let t_max = sites.iter().map(|s| s.point.y).fold(f64::NEG_INFINITY, f64::max);
    let pi = std::f64::consts::PI;
    Rect::new(
        Point::new(1e-9 * r_max, t_min - pi),
        Point::new(4.0 * (2.0 * r_max + w_max), t_max + pi),
    )
}

fn changes_sign(v: [f64; 4]) -> bool {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lo <= 0.0 && hi >= 0.0
}

fn solve_grid(
    sys: &TripleSystem,
    regions: &[Region],
    scale: f64,
    config: &SolverConfig,
) -> (Vec<Point>, SolverStats) {
    let n = config.grid.max(2);
    let mut seeds = Vec::new();
    for region in regions {
        let corners: Vec<[f64; 2]> = (0..=n)
            .into_par_iter()
            .flat_map_iter(|j| {
                (0..=n).map(move |i| {
                    sys.g(region.at(i as f64 / n as f64, j as f64 / n as f64))
                })
            })
            .collect();
        let at = |i: usize, j: usize| corners[j * (n + 1) + i];
        // Which components change sign in each cell.
        let mut flags = vec![[false; 2]; n * n];
        for j in 0..n {
            for i in 0..n {
                let c = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
                if c.iter().any(|v| !(v[0].is_finite() && v[1].is_finite())) {
                    continue;
                }
                flags[j * n + i] = [changes_sign(c.map(|v| v[0])), changes_sign(c.map(|v| v[1]))];
            }
        }
        // Zero curves bend inside a cell without showing at its corners, so
        // a cell is seeded when both curves pass through its neighborhood.
        for j in 0..n {
            for i in 0..n {
                let mut near = [false; 2];
                for jj in j.saturating_sub(1)..(j + 2).min(n) {
                    for ii in i.saturating_sub(1)..(i + 2).min(n) {
                        let f = flags[jj * n + ii];
                        near = [near[0] || f[0], near[1] || f[1]];
                    }
                }
                if near[0] && near[1] {
                    seeds.push(region.at(
                        (i as f64 + 0.5) / n as f64,
                        (j as f64 + 0.5) / n as f64,
                    ));
                }
            }
        }
    }
    let results: Vec<(Point, usize)> = seeds
        .par_iter()
        .map(|&x0| newton(sys, x0, scale, config))
        .collect();
    let stats = SolverStats {
        seeds_tried: seeds.len(),
        newton_iterations: results.iter().map(|r| r.1).sum(),
    };
    (results.into_iter().map(|r| r.0).collect(), stats)
}

/// Damped Newton on `g` with a central-difference Jacobian.
fn newton(sys: &TripleSystem, x0: Point, scale: f64, config: &SolverConfig) -> (Point, usize) {
    let h = config.fd_step * scale.max(1.0);
    let size = |g: [f64; 2]| g[0].abs().max(g[1].abs());
    let mut x = x0;
    let mut gx = sys.g(x);
    let mut iters = 0;
    while iters < config.max_newton_iter {
        if !(gx[0].is_finite() && gx[1].is_finite()) || size(gx) <= 1e-15 * scale {
            break;
        }
        iters += 1;
        let dx = Point::new(h, 0.0);
        let dy = Point::new(0.0, h);
        let (gxp, gxm) = (sys.g(x + dx), sys.g(x - dx));
        let (gyp, gym) = (sys.g(x + dy), sys.g(x - dy));
        let j00 = (gxp[0] - gxm[0]) / (2.0 * h);
        let j10 = (gxp[1] - gxm[1]) / (2.0 * h);
        let j01 = (gyp[0] - gym[0]) / (2.0 * h);
        let j11 = (gyp[1] - gym[1]) / (2.0 * h);
        let det = j00 * j11 - j01 * j10;
        if !det.is_finite() || det.abs() < 1e-300 {
            break;
        }
        let step = Point::new(
            -(j11 * gx[0] - j01 * gx[1]) / det,
            -(-j10 * gx[0] + j00 * gx[1]) / det,
        );
        let mut t = 1.0;
        let mut moved = false;
        while t > 1e-6 {
            let cand = x + step * t;
            let gc = sys.g(cand);
            if size(gc) < size(gx) {
                x = cand;
                gx = gc;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (x, iters)
}

/// Roots of `D_apex − D_k` along the ray `apex + t·direction`, `t >= 0`.
fn solve_on_ray(
    sys: &TripleSystem,
    apex_index: usize,
    other: usize,
    direction: Point,
    config: &SolverConfig,
) -> (Vec<Point>, SolverStats) {
    let apex = sys.sites[apex_index].point;
    let reach = sys
        .search_boxes(config)
        .last()
        .map(|b| b.width())
        .unwrap_or(1.0)
        + apex.length();
    // Every point of the ray balances the degenerate pair, so the sign
    // changes of the remaining difference are the triple points.
    let h = |t: f64| {
        let d = sys.weighted(apex + direction * t);
        d[apex_index] - d[other]
    };
    let samples = 16 * config.grid * config.grid.max(2);
    let ts: Vec<f64> = (0..=samples)
        .map(|m| {
            let u = m as f64 / samples as f64;
            reach * u * u
        })
        .collect();
    let mut roots = vec![apex];
    let mut evals = ts.len();
    for w in ts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let (h0, h1) = (h(t0), h(t1));
        if h0 == 0.0 {
            roots.push(apex + direction * t0);
        }
        if h0 * h1 < 0.0 {
            let (mut lo, mut hi, mut hlo) = (t0, t1, h0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let hm = h(mid);
                evals += 1;
                if (hm < 0.0) == (hlo < 0.0) {
                    lo = mid;
                    hlo = hm;
                } else {
                    hi = mid;
                }
            }
            roots.push(apex + direction * (0.5 * (lo + hi)));
        }
    }
    (
        roots,
        SolverStats {
            seeds_tried: evals,
            newton_iterations: 0,
        },
    )
}
