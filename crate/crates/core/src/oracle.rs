//! Reference searches for triple points that share nothing with the Newton
//! solver.
//!
//! On a strictly convex plane, `D_1 − D_k` is nondecreasing along every ray
//! leaving `s_1` (the norm's gradient pairs with a unit vector to at most 1),
//! so each bisector crosses each such ray at most once. The crossing
//! parameters `t_2(θ)`, `t_3(θ)` are found by bisection, and triple points are
//! the zeros of `t_2 − t_3` over a dense scan of `θ`.
//!
//! Elsewhere a quadtree search is used: a square cell with center `c` and
//! half-width `h` cannot contain a root of `g` when some component satisfies `|g_k(c)| > L·h·√2`, where `L` bounds
//! the Lipschitz constant of `g`. Cells that survive are split until they are
//! smaller than `min_cell`; survivors are clustered into roots. Nothing here
//! shares code with the Newton solver.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{DistanceField, Metric};
use crate::norm::NormSpec;
use crate::point::{Point, Rect};
use crate::triple::{check_triple, SolverConfig, TripleSystem};
use crate::voronoi::WeightedSite;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExclusionConfig {
    /// Stop splitting below this half-width.
    pub min_cell: f64,
    /// Give up when a level has more live cells than this.
    pub max_cells: usize,
    /// Survivors closer than this belong to the same root.
    pub cluster_radius: f64,
}

impl Default for ExclusionConfig {
    fn default() -> Self {
        ExclusionConfig {
            min_cell: 1e-10,
            max_cells: 4_000_000,
            cluster_radius: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    center: Point,
    half: f64,
}

/// All roots of `g` in `region`, to within about `min_cell`.
///
/// `lipschitz` must bound `|g_k(p) − g_k(q)| / |p − q|` for both components.
pub fn exclusion_roots<G>(
    g: G,
    lipschitz: f64,
    region: Rect,
    config: &ExclusionConfig,
) -> Result<Vec<Point>>
where
    G: Fn(Point) -> [f64; 2] + Sync,
{
    if !(region.is_valid() && lipschitz.is_finite() && lipschitz > 0.0) {
        return Err(Error::InvalidInput("bad exclusion region".into()));
    }
    let side = region.width().max(region.height());
    let half = 0.5 * side.min(region.width().min(region.height()).max(side / 64.0));
    let nx = (region.width() / (2.0 * half)).ceil().max(1.0) as usize;
    let ny = (region.height() / (2.0 * half)).ceil().max(1.0) as usize;
    let mut live: Vec<Cell> = (0..ny)
        .flat_map(|j| {
            (0..nx).map(move |i| Cell {
                center: region.min + Point::new((2 * i + 1) as f64 * half, (2 * j + 1) as f64 * half),
                half,
            })
        })
        .collect();

    let survives = |c: &Cell| {
        let v = g(c.center);
        let reach = lipschitz * c.half * std::f64::consts::SQRT_2 * (1.0 + 1e-9) + 1e-300;
        v[0].is_finite() && v[1].is_finite() && v[0].abs() <= reach && v[1].abs() <= reach
    };

    let mut current_half = half;
    loop {
        live.retain(|c| survives(c));
        if live.len() > config.max_cells {
            return Err(Error::InvalidInput(format!(
                "exclusion search inconclusive: {} live cells at half-width {current_half:e}",
                live.len()
            )));
        }
        if current_half <= config.min_cell || live.is_empty() {
            break;
        }
        current_half *= 0.5;
        let h = current_half;
        live = live
            .par_iter()
            .flat_map_iter(|c| {
                [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)].map(|(sx, sy)| Cell {
                    center: c.center + Point::new(sx * h, sy * h),
                    half: h,
                })
            })
            .filter(|c| survives(c))
            .collect();
    }

    // Cluster by single linkage; represent each cluster by its best cell.
    live.sort_by(|a, b| a.center.x.total_cmp(&b.center.x));
    let mut parent: Vec<usize> = (0..live.len()).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..live.len() {
        for j in i + 1..live.len() {
            if live[j].center.x - live[i].center.x > config.cluster_radius {
                break;
            }
            if (live[j].center - live[i].center).length() <= config.cluster_radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let size = |p: Point| {
        let v = g(p);
        v[0].abs().max(v[1].abs())
    };
    let mut best: std::collections::BTreeMap<usize, (Point, f64)> = Default::default();
    for i in 0..live.len() {
        let root = find(&mut parent, i);
        let p = live[i].center;
        let s = size(p);
        best.entry(root)
            .and_modify(|e| {
                if s < e.1 {
                    *e = (p, s);
                }
            })
            .or_insert((p, s));
    }
    let mut out: Vec<Point> = best.into_values().map(|e| e.0).collect();
    out.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    Ok(out)
}

/// Region the reference search covers for a triple: the solver's outermost
/// planar box, the whole fundamental domain on a torus, and a generous chart
/// window on the cone.
pub fn oracle_region(field: &DistanceField, sites: &[WeightedSite; 3], solver: &SolverConfig) -> Rect {
    let sys = TripleSystem { field, sites };
    match field {
        DistanceField::NormPlane(_) => sys.planar_region(solver),
        DistanceField::Torus(t) => {
            let corners = [Point::ORIGIN, t.u(), t.v(), t.u() + t.v()];
            let min = corners.iter().fold(Point::new(f64::INFINITY, f64::INFINITY), |m, p| {
                Point::new(m.x.min(p.x), m.y.min(p.y))
            });
            let max = corners
                .iter()
                .fold(Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |m, p| {
                    Point::new(m.x.max(p.x), m.y.max(p.y))
                });
            Rect::new(min, max)
        }
        DistanceField::Cone => {
            let r_max = sites.iter().map(|s| s.point.x).fold(0.0, f64::max);
            let w_max = sites.iter().map(|s| s.weight.abs()).fold(0.0, f64::max);
            let t_min = sites.iter().map(|s| s.point.y).fold(f64::INFINITY, f64::min);
            let t_max = sites.iter().map(|s| s.point.y).fold(f64::NEG_INFINITY, f64::max);
            let pi = std::f64::consts::PI;
            Rect::new(
                Point::new(1e-9 * r_max, t_min - pi),
                Point::new(8.0 * (2.0 * r_max + w_max), t_max + pi),
            )
        }
    }
}

/// Triple points found by exclusion alone, canonicalized, deduplicated
/// with `dedup_radius` and sorted by `(x, y)`.
pub fn oracle_triple_points(
    field: &DistanceField,
    sites: &[WeightedSite; 3],
    region: Rect,
    dedup_radius: f64,
    config: &ExclusionConfig,
) -> Result<Vec<Point>> {
    check_triple(field, sites)?;
    let sys = TripleSystem { field, sites };
    if let DistanceField::NormPlane(norm) = field {
        return Ok(ray_sweep(norm, sites, region, RAY_SWEEP_SAMPLES, dedup_radius));
    }
    let lipschitz = 2.0 * field.lipschitz_bound(&region);
    let raw = exclusion_roots(|p| sys.g(p), lipschitz, region, config)?;
    let mut pts: Vec<Point> = raw.into_iter().map(|p| field.canonical(p)).collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut kept: Vec<Point> = Vec::new();
    for p in pts {
        if kept.iter().all(|q| field.dist(*q, p) >= dedup_radius) {
            kept.push(p);
        }
    }
    Ok(kept)
}

/// Angular samples of the planar ray sweep.
pub const RAY_SWEEP_SAMPLES: usize = 1 << 15;

/// Parameter where the bisector of sites 0 and `k` crosses the ray
/// `s_0 + t·u`, `N(u) = 1`; infinite when the crossing lies beyond `t_max`,
/// `None` when the whole ray is on the far side.
fn crossing(norm: &NormSpec, sites: &[WeightedSite; 3], k: usize, u: Point, t_max: f64) -> Option<f64> {
    let c = sites[0].point;
    let f = |t: f64| t + sites[0].weight - norm.distance(c + u * t, sites[k].point) - sites[k].weight;
    let (mut lo, mut hi) = (0.0, t_max);
    if f(lo) > 0.0 {
        return None;
    }
    if f(hi) < 0.0 {
        return Some(f64::INFINITY);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Planar triple points inside `region` by the monotone ray sweep.
pub fn ray_sweep(
    norm: &NormSpec,
    sites: &[WeightedSite; 3],
    region: Rect,
    samples: usize,
    dedup_radius: f64,
) -> Vec<Point> {
    let c = sites[0].point;
    let corners = [region.min, region.max, Point::new(region.min.x, region.max.y), Point::new(region.max.x, region.min.y)];
    let reach = corners.iter().map(|q| (*q - c).length()).fold(0.0, f64::max);
    let tau = std::f64::consts::TAU;
    // Norm-unit direction and the largest parameter that stays in reach.
    let ray = |theta: f64| {
        let dir = Point::from_angle(theta);
        let n = norm.norm(dir);
        (dir * (1.0 / n), reach * n)
    };
    let gap = |theta: f64| {
        let (u, t_max) = ray(theta);
        let t2 = crossing(norm, sites, 1, u, t_max)?;
        let t3 = crossing(norm, sites, 2, u, t_max)?;
        let h = t2 - t3;
        (!h.is_nan()).then(|| (h, c + u * t2.min(t3)))
    };
    let values: Vec<Option<(f64, Point)>> = (0..=samples)
        .into_par_iter()
        .map(|m| gap(tau * m as f64 / samples as f64))
        .collect();
    let sys = TripleSystem {
        field: &DistanceField::NormPlane(norm.clone()),
        sites,
    };
    let scale = sys.diameter() + sys.max_abs_weight();
    let mut found: Vec<Point> = Vec::new();
    for m in 0..samples {
        let (Some((h0, p0)), Some((h1, _))) = (values[m], values[m + 1]) else {
            continue;
        };
        let root = if h0 == 0.0 && p0.is_finite() {
            Some(p0)
        } else if h0 * h1 < 0.0 {
            let (mut lo, mut hi) = (tau * m as f64 / samples as f64, tau * (m + 1) as f64 / samples as f64);
            let mut best = None;
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                let Some((hm, pm)) = gap(mid) else {
                    break;
                };
                if pm.is_finite() {
                    best = Some(pm);
                }
                if mid <= lo || mid >= hi || hm == 0.0 {
                    break;
                }
                if (hm < 0.0) == (h0 < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best
        } else {
            None
        };
        if let Some(p) = root {
            if region.contains(p) && sys.residual(p) <= 1e-8 * scale.max(1.0) {
                found.push(p);
            }
        }
    }
    found.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut kept: Vec<Point> = Vec::new();
    for p in found {
        if kept.iter().all(|q| (*q - p).length() >= dedup_radius) {
            kept.push(p);
        }
    }
    kept
}
