//! Flat tori and the infinite-angle cone.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// Window of lattice coefficients scanned by [`FlatTorus::distance`].
pub const TORUS_WINDOW: i32 = 2;

/// Euclidean plane modulo the lattice generated by `u` and `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatTorus {
    u: Point,
    v: Point,
    // Lagrange–Gauss reduced basis of the same lattice.
    ru: Point,
    rv: Point,
}

impl FlatTorus {
    /// Euler genus of every torus.
    pub const EULER_GENUS: i64 = 2;

    pub fn new(u: Point, v: Point) -> Result<FlatTorus> {
        let det = u.cross(v);
        if !(u.is_finite() && v.is_finite()) || det.abs() <= 1e-12 {
            return Err(Error::DegenerateLattice(det));
        }
        let (ru, rv) = gauss_reduce(u, v);
        Ok(FlatTorus { u, v, ru, rv })
    }

    pub fn square(side: f64) -> Result<FlatTorus> {
        FlatTorus::new(Point::new(side, 0.0), Point::new(0.0, side))
    }

    pub fn u(&self) -> Point {
        self.u
    }

    pub fn v(&self) -> Point {
        self.v
    }

    pub fn area(&self) -> f64 {
        self.u.cross(self.v).abs()
    }

    /// Lattice coordinates `(a, b)` with `p = a·u + b·v`.
    pub fn coefficients(&self, p: Point) -> (f64, f64) {
        lattice_coefficients(self.u, self.v, p)
    }

    pub fn from_coefficients(&self, a: f64, b: f64) -> Point {
        self.u * a + self.v * b
    }

    /// Canonical representative with lattice coefficients in `[0, 1)`.
    pub fn reduce(&self, p: Point) -> Point {
        let (a, b) = self.coefficients(p);
        self.from_coefficients(frac(a), frac(b))
    }

    /// Shortest Euclidean length among all lattice translates of `q − p`.
    pub fn distance(&self, p: Point, q: Point) -> f64 {
        let p = self.reduce(p);
        let q = self.reduce(q);
        // Center the difference in the reduced basis before the window scan.
        let d = q - p;
        let (a, b) = lattice_coefficients(self.ru, self.rv, d);
        let d = d - self.ru * a.round() - self.rv * b.round();
        let mut best = f64::INFINITY;
        for i in -TORUS_WINDOW..=TORUS_WINDOW {
            for j in -TORUS_WINDOW..=TORUS_WINDOW {
                let w = d + self.ru * i as f64 + self.rv * j as f64;
                best = best.min(w.x * w.x + w.y * w.y);
            }
        }
        best.sqrt()
    }

    /// Reference distance: reduce both points, then scan translates
    /// `i·u + j·v` for `|i|, |j| <= window` of the original basis.
    pub fn distance_window(&self, p: Point, q: Point, window: i32) -> f64 {
        let d = self.reduce(q) - self.reduce(p);
        let mut best = f64::INFINITY;
        for i in -window..=window {
            for j in -window..=window {
                best = best.min((d + self.u * i as f64 + self.v * j as f64).length());
            }
        }
        best
    }

    /// The translate of `q` nearest to `p` in the plane.
    pub fn nearest_translate(&self, p: Point, q: Point) -> Point {
        let d = q - p;
        let (a, b) = lattice_coefficients(self.ru, self.rv, d);
        let d = d - self.ru * a.round() - self.rv * b.round();
        let mut best = d;
        for i in -TORUS_WINDOW..=TORUS_WINDOW {
            for j in -TORUS_WINDOW..=TORUS_WINDOW {
                let w = d + self.ru * i as f64 + self.rv * j as f64;
                if w.length() < best.length() {
                    best = w;
                }
            }
        }
        p + best
    }
}

fn frac(a: f64) -> f64 {
    let f = a - a.floor();
    // `a - floor(a)` can round up to exactly 1 for tiny negative `a`.
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

fn lattice_coefficients(u: Point, v: Point, p: Point) -> (f64, f64) {
    let det = u.cross(v);
    (p.cross(v) / det, u.cross(p) / det)
}

fn gauss_reduce(mut u: Point, mut v: Point) -> (Point, Point) {
    if u.length() > v.length() {
        std::mem::swap(&mut u, &mut v);
    }
    loop {
        let m = (u.dot(v) / u.dot(u)).round();
        v = v - u * m;
        if v.length() >= u.length() {
            return (u, v);
        }
        std::mem::swap(&mut u, &mut v);
    }
}

/// The hexagonal torus together with the center of the hexagon and one
/// representative of each of the two vertex classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexTorus {
    pub torus: FlatTorus,
    pub center: Point,
    pub vclass1: Point,
    pub vclass2: Point,
}

/// Glue opposite edges of the regular hexagon with the given circumradius,
/// centered at the origin with vertices at multiples of 60°.
///
/// The gluing translations are perpendicular to the edges with length
/// `√3·R`; two of them generate the lattice. Vertices at 0°, 120°, 240° form
/// one orbit and 60°, 180°, 300° the other.
pub fn hexagonal_torus(circumradius: f64) -> Result<HexTorus> {
    if !(circumradius.is_finite() && circumradius > 0.0) {
        return Err(Error::InvalidInput(format!(
            "circumradius must be positive, got {circumradius}"
        )));
    }
    let gap = 3.0_f64.sqrt() * circumradius;
    let u = Point::from_angle(PI / 6.0) * gap;
    let v = Point::new(0.0, gap);
    Ok(HexTorus {
        torus: FlatTorus::new(u, v)?,
        center: Point::ORIGIN,
        vclass1: Point::from_angle(0.0) * circumradius,
        vclass2: Point::from_angle(PI / 3.0) * circumradius,
    })
}

/// A point of the infinite-angle cone. `theta` is never reduced mod 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub r: f64,
    pub theta: f64,
}

impl ConePoint {
    pub fn new(r: f64, theta: f64) -> ConePoint {
        ConePoint { r, theta }
    }

    pub fn to_chart(self) -> Point {
        Point::new(self.r, self.theta)
    }

    pub fn from_chart(p: Point) -> ConePoint {
        ConePoint::new(p.x, p.y)
    }
}

/// The locally Euclidean surface of polar points `(r, θ)` with `r > 0` and
/// unbounded `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InfiniteCone;

impl InfiniteCone {
    /// Geodesic distance without radius validation; callers guarantee `r > 0`.
    #[inline]
    pub fn distance_unchecked(&self, p: ConePoint, q: ConePoint) -> f64 {
        let dt = (p.theta - q.theta).abs();
        if dt >= PI {
            p.r + q.r
        } else {
            let sq = p.r * p.r + q.r * q.r - 2.0 * p.r * q.r * dt.cos();
            sq.max(0.0).sqrt()
        }
    }
}

pub fn cone_distance(p: ConePoint, q: ConePoint) -> Result<f64> {
    for c in [p, q] {
        if !(c.r.is_finite() && c.r > 0.0) {
            return Err(Error::NonPositiveRadius(c.r));
        }
        if !c.theta.is_finite() {
            return Err(Error::InvalidInput(format!("cone angle {} is not finite", c.theta)));
        }
    }
    Ok(InfiniteCone.distance_unchecked(p, q))
}

/// `k` points `(1/2, iπ)`, `i = 0..k`, pairwise at distance exactly 1.
pub fn cone_equilateral_set(k: usize) -> Result<Vec<ConePoint>> {
    if k < 2 {
        return Err(Error::InvalidInput(format!(
            "an equilateral set needs at least 2 points, got {k}"
        )));
    }
    Ok((0..k).map(|i| ConePoint::new(0.5, i as f64 * PI)).collect())
}

/// Most points that can be simultaneously equidistant from three sites on a
/// surface of Euler genus `g`: `2g + 2`.
pub fn max_equidistant_bound(euler_genus: i64) -> Result<u64> {
    if euler_genus < 0 {
        return Err(Error::NegativeGenus(euler_genus));
    }
    Ok(2 * euler_genus as u64 + 2)
}
