//! Additively weighted Voronoi diagrams over a [`DistanceField`].
//!
//! Site `i` owns `p` when `d(p, s_i) + w_i` is minimal among all sites.
//! Cells are never stored; membership is evaluated on demand.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{DistanceField, Metric};
use crate::point::{Point, Rect};

/// Tolerance on weighted-distance ties used by [`Diagram::owner`].
pub const OWNER_TOL: f64 = 1e-9;

/// Site points closer than this are considered coincident.
pub const MIN_SITE_SEPARATION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "SiteJson", into = "SiteJson")]
pub struct WeightedSite {
    pub point: Point,
    pub weight: f64,
}

impl WeightedSite {
    pub fn new(point: Point, weight: f64) -> Self {
        WeightedSite { point, weight }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct SiteJson {
    x: f64,
    y: f64,
    #[serde(default)]
    w: f64,
}

impl From<SiteJson> for WeightedSite {
    fn from(s: SiteJson) -> Self {
        WeightedSite::new(Point::new(s.x, s.y), s.w)
    }
}

impl From<WeightedSite> for SiteJson {
    fn from(s: WeightedSite) -> Self {
        SiteJson {
            x: s.point.x,
            y: s.point.y,
            w: s.weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SiteClass {
    NonDegenerate,
    /// The cell lies on the ray from the site in this (unit) direction.
    DegenerateRay { direction: Point },
    EmptyCell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiagramJson", into = "DiagramJson")]
pub struct Diagram {
    field: DistanceField,
    sites: Vec<WeightedSite>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub field: DistanceField,
    pub sites: Vec<WeightedSite>,
}

impl TryFrom<DiagramJson> for Diagram {
    type Error = Error;
    fn try_from(j: DiagramJson) -> Result<Diagram> {
        Diagram::new(j.field, j.sites)
    }
}

impl From<Diagram> for DiagramJson {
    fn from(d: Diagram) -> DiagramJson {
        DiagramJson {
            field: d.field,
            sites: d.sites,
        }
    }
}

impl Diagram {
    pub fn new(field: DistanceField, sites: Vec<WeightedSite>) -> Result<Diagram> {
        if sites.is_empty() {
            return Err(Error::InvalidInput("a diagram needs at least one site".into()));
        }
        for s in &sites {
            field.check_point(s.point)?;
            if !s.weight.is_finite() {
                return Err(Error::InvalidInput(format!("weight {} is not finite", s.weight)));
            }
        }
        for i in 0..sites.len() {
            for j in i + 1..sites.len() {
                if field.dist(sites[i].point, sites[j].point) <= MIN_SITE_SEPARATION {
                    return Err(Error::DuplicatePoint(i, j));
                }
            }
        }
        Ok(Diagram { field, sites })
    }

    pub fn field(&self) -> &DistanceField {
        &self.field
    }

    pub fn sites(&self) -> &[WeightedSite] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn weighted_distance(&self, i: usize, p: Point) -> Result<f64> {
        let s = self.sites.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            len: self.sites.len(),
        })?;
        Ok(self.field.dist(p, s.point) + s.weight)
    }

    fn weighted_distances(&self, p: Point) -> Vec<f64> {
        self.sites
            .iter()
            .map(|s| self.field.dist(p, s.point) + s.weight)
            .collect()
    }

    /// Indices whose weighted distance is within `tol` of the minimum.
    pub fn owner(&self, p: Point, tol: f64) -> Vec<usize> {
        let d = self.weighted_distances(p);
        let best = d.iter().copied().fold(f64::INFINITY, f64::min);
        (0..d.len()).filter(|&i| d[i] <= best + tol).collect()
    }

    /// Lowest-index owner.
    pub fn label(&self, p: Point, tol: f64) -> usize {
        self.owner(p, tol)[0]
    }

    /// Gap between the smallest and second-smallest weighted distance at `p`
    /// and the index attaining the smallest.
    pub fn ownership_gap(&self, p: Point) -> (usize, f64) {
        let d = self.weighted_distances(p);
        let mut order: Vec<usize> = (0..d.len()).collect();
        order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
        let gap = if d.len() > 1 {
            d[order[1]] - d[order[0]]
        } else {
            f64::INFINITY
        };
        (order[0], gap)
    }

    /// Classify each site as non-degenerate, degenerate with a ray cell, or
    /// empty. Requires a strictly convex norm on the plane.
    pub fn classify_sites(&self, tol: f64) -> Result<Vec<SiteClass>> {
        match &self.field {
            DistanceField::NormPlane(spec) if spec.is_strict() => {}
            DistanceField::NormPlane(_) => return Err(Error::NonStrictNorm),
            _ => return Err(Error::UnsupportedField),
        }
        let classes = (0..self.sites.len())
            .map(|i| {
                let si = self.sites[i];
                let mut empty = false;
                let mut nearest_tie: Option<(usize, f64)> = None;
                for (j, sj) in self.sites.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let dij = self.field.dist(si.point, sj.point);
                    let other = dij + sj.weight;
                    if other < si.weight - tol {
                        empty = true;
                    } else if (other - si.weight).abs() <= tol
                        && nearest_tie.is_none_or(|(_, d)| dij < d)
                    {
                        nearest_tie = Some((j, dij));
                    }
                }
                if empty {
                    SiteClass::EmptyCell
                } else if let Some((j, _)) = nearest_tie {
                    SiteClass::DegenerateRay {
                        direction: (si.point - self.sites[j].point).normalized(),
                    }
                } else {
                    SiteClass::NonDegenerate
                }
            })
            .collect();
        Ok(classes)
    }

    /// Whether every sample on `rings` concentric circles of radius up to
    /// `radius` around site `i` is owned by `i` alone.
    pub fn site_is_interior(&self, i: usize, radius: f64, samples: usize) -> bool {
        let s = self.sites[i].point;
        let rings = 4;
        (1..=rings).all(|ring| {
            let r = radius * ring as f64 / rings as f64;
            (0..samples).all(|k| {
                let theta = std::f64::consts::TAU * k as f64 / samples as f64;
                let p = s + Point::from_angle(theta) * r;
                self.owner(p, 0.0) == [i]
            })
        })
    }

    /// Label each pixel center of a `resolution × resolution` grid over
    /// `bbox` with its lowest-index owner.
    pub fn cell_raster(&self, bbox: Rect, resolution: usize) -> Result<Raster> {
        if resolution < 2 {
            return Err(Error::InvalidInput(format!(
                "raster resolution must be at least 2, got {resolution}"
            )));
        }
        if !bbox.is_valid() {
            return Err(Error::InvalidInput("raster bounding box is empty".into()));
        }
        let labels: Vec<usize> = (0..resolution)
            .into_par_iter()
            .flat_map_iter(|row| {
                (0..resolution).map(move |col| self.label(pixel_center(&bbox, resolution, row, col), OWNER_TOL))
            })
            .collect();
        Ok(Raster {
            bbox,
            resolution,
            labels,
        })
    }
}

/// Pixel `(row, col)` center; row 0 is the top (largest `y`).
pub fn pixel_center(bbox: &Rect, resolution: usize, row: usize, col: usize) -> Point {
    let n = resolution as f64;
    Point::new(
        bbox.min.x + (col as f64 + 0.5) * bbox.width() / n,
        bbox.max.y - (row as f64 + 0.5) * bbox.height() / n,
    )
}

/// Owner labels, row-major with row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub bbox: Rect,
    pub resolution: usize,
    pub labels: Vec<usize>,
}

impl Raster {
    pub fn get(&self, row: usize, col: usize) -> usize {
        self.labels[row * self.resolution + col]
    }

    /// Horizontal runs `(row, col_start, len, label)` of equal labels.
    pub fn runs(&self) -> Vec<(usize, usize, usize, usize)> {
        let n = self.resolution;
        let mut out = Vec::new();
        for row in 0..n {
            let mut start = 0;
            for col in 1..=n {
                if col == n || self.get(row, col) != self.get(row, start) {
                    out.push((row, start, col - start, self.get(row, start)));
                    start = col;
                }
            }
        }
        out
    }
}
