//! The distance fields the Voronoi machinery runs on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::NormSpec;
use crate::point::{Point, Rect};
use crate::surface::{ConePoint, FlatTorus, InfiniteCone};

/// A geodesic distance on a 2D chart.
pub trait Metric {
    fn dist(&self, p: Point, q: Point) -> f64;
}

impl Metric for NormSpec {
    #[inline]
    fn dist(&self, p: Point, q: Point) -> f64 {
        self.distance(p, q)
    }
}

impl Metric for FlatTorus {
    #[inline]
    fn dist(&self, p: Point, q: Point) -> f64 {
        self.distance(p, q)
    }
}

impl Metric for InfiniteCone {
    #[inline]
    fn dist(&self, p: Point, q: Point) -> f64 {
        self.distance_unchecked(ConePoint::from_chart(p), ConePoint::from_chart(q))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldJson", into = "FieldJson")]
pub enum DistanceField {
    NormPlane(NormSpec),
    Torus(FlatTorus),
    /// Chart coordinates are `(r, θ)`.
    Cone,
}

impl Metric for DistanceField {
    #[inline]
    fn dist(&self, p: Point, q: Point) -> f64 {
        match self {
            DistanceField::NormPlane(spec) => spec.distance(p, q),
            DistanceField::Torus(t) => t.distance(p, q),
            DistanceField::Cone => InfiniteCone.dist(p, q),
        }
    }
}

impl DistanceField {
    pub fn euclidean() -> DistanceField {
        DistanceField::NormPlane(NormSpec::euclidean())
    }

    pub fn norm(&self) -> Option<&NormSpec> {
        match self {
            DistanceField::NormPlane(spec) => Some(spec),
            _ => None,
        }
    }

    pub fn is_strict_plane(&self) -> bool {
        self.norm().is_some_and(NormSpec::is_strict)
    }

    /// Euler genus of the underlying surface.
    pub fn euler_genus(&self) -> i64 {
        match self {
            DistanceField::Torus(_) => FlatTorus::EULER_GENUS,
            _ => 0,
        }
    }

    /// Canonical chart representative (fundamental domain on tori).
    pub fn canonical(&self, p: Point) -> Point {
        match self {
            DistanceField::Torus(t) => t.reduce(p),
            _ => p,
        }
    }

    pub fn check_point(&self, p: Point) -> Result<()> {
        if !p.is_finite() {
            return Err(Error::InvalidInput(format!("point ({}, {}) is not finite", p.x, p.y)));
        }
        if matches!(self, DistanceField::Cone) && p.x <= 0.0 {
            return Err(Error::NonPositiveRadius(p.x));
        }
        Ok(())
    }

    /// Upper bound on how fast `dist(·, q)` changes per unit of Euclidean
    /// chart displacement inside `region`.
    pub fn lipschitz_bound(&self, region: &Rect) -> f64 {
        match self {
            DistanceField::NormPlane(spec) => 1.0 / spec.inradius_bound(),
            DistanceField::Torus(_) => 1.0,
            // |∂d/∂r| <= 1 and |∂d/∂θ| <= r.
            DistanceField::Cone => {
                let r = region.max.x.abs().max(region.min.x.abs());
                (1.0 + r * r).sqrt()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FieldJson {
    NormPlane { norm: NormSpec },
    Torus { u: [f64; 2], v: [f64; 2] },
    Cone,
}

impl TryFrom<FieldJson> for DistanceField {
    type Error = Error;

    fn try_from(json: FieldJson) -> Result<DistanceField> {
        Ok(match json {
            FieldJson::NormPlane { norm } => DistanceField::NormPlane(norm),
            FieldJson::Torus { u, v } => DistanceField::Torus(FlatTorus::new(
                Point::new(u[0], u[1]),
                Point::new(v[0], v[1]),
            )?),
            FieldJson::Cone => DistanceField::Cone,
        })
    }
}

impl From<DistanceField> for FieldJson {
    fn from(field: DistanceField) -> FieldJson {
        match field {
            DistanceField::NormPlane(norm) => FieldJson::NormPlane { norm },
            DistanceField::Torus(t) => FieldJson::Torus {
                u: [t.u().x, t.u().y],
                v: [t.v().x, t.v().y],
            },
            DistanceField::Cone => FieldJson::Cone,
        }
    }
}
