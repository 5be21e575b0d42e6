//! Convex distance functions on the plane.
//!
//! A [`NormSpec`] describes a centrally symmetric convex unit ball `K`. The
//! distance `d_K(p, q)` is the smallest factor `s` such that `q` lies in
//! `p + s·K`, which equals `‖q − p‖_K`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// Largest accepted `L_p` exponent. Beyond this the ball is numerically
/// indistinguishable from the non-strict `L_∞` square.
pub const MAX_LP_EXPONENT: f64 = 64.0;

/// Sampling parameters for [`NormSpec::strictness_margin`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrictnessConfig {
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for StrictnessConfig {
    fn default() -> Self {
        StrictnessConfig {
            samples: 4096,
            tolerance: 1e-9,
        }
    }
}

/// One boundary piece of an [`ArcBody`]: the counterclockwise arc of the
/// circle `center + radius·(cos a, sin a)` for `a` in `[start_angle, end_angle]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularArc {
    pub center: Point,
    pub radius: f64,
    pub start_angle: f64,
    pub end_angle: f64,
}

impl CircularArc {
    pub fn point_at(&self, angle: f64) -> Point {
        self.center + Point::from_angle(angle) * self.radius
    }

    pub fn start(&self) -> Point {
        self.point_at(self.start_angle)
    }

    pub fn end(&self) -> Point {
        self.point_at(self.end_angle)
    }

    /// The arc reflected through the origin.
    pub fn negated(&self) -> CircularArc {
        CircularArc {
            center: -self.center,
            radius: self.radius,
            start_angle: self.start_angle + PI,
            end_angle: self.end_angle + PI,
        }
    }

    /// Distance along the ray from the origin in direction `dir` (unit) to
    /// this arc's circle. The origin must lie inside the circle.
    #[inline]
    fn ray_hit(&self, dir: Point) -> f64 {
        let b = dir.dot(self.center);
        let c = self.center.dot(self.center) - self.radius * self.radius;
        b + (b * b - c).sqrt()
    }
}

/// A strictly convex, centrally symmetric unit ball bounded by circular arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcBody {
    arcs: Vec<CircularArc>,
    /// Polar angle in `[0, 2π)` of each arc's start point, ascending.
    starts: Vec<f64>,
}

/// Regular `2m`-gon of unit circumradius with each edge replaced by an
/// arc of the given radius.
pub fn rounded_polygon(m: usize, radius: f64) -> Vec<CircularArc> {
    let n = 2 * m;
    (0..n)
        .map(|k| {
            let a = Point::from_angle(TAU * k as f64 / n as f64);
            let b = Point::from_angle(TAU * (k + 1) as f64 / n as f64);
            let mid = a.lerp(b, 0.5);
            let half = 0.5 * a.euclidean_distance(b);
            let inward = (b - a).perp().normalized();
            let center = mid + inward * (radius * radius - half * half).sqrt();
            CircularArc {
                center,
                radius,
                start_angle: (a - center).angle(),
                end_angle: (a - center).angle()
                    + ((a - center).cross(b - center)).atan2((a - center).dot(b - center)),
            }
        })
        .collect()
}

impl ArcBody {
    /// [`rounded_polygon`] as a validated body.
    pub fn rounded_polygon(m: usize, radius: f64) -> Result<ArcBody> {
        ArcBody::new(rounded_polygon(m, radius))
    }

    /// Validates and canonicalizes an arc list.
    ///
    /// The arcs must join end to start in counterclockwise order, wind once
    /// around the origin, map onto themselves under `v → −v`, and bound a
    /// strictly convex region.
    pub fn new(arcs: Vec<CircularArc>) -> Result<ArcBody> {
        let n = arcs.len();
        if n < 2 || n % 2 != 0 {
            return Err(Error::InvalidSpec(format!(
                "arc body needs an even number (>= 2) of arcs, got {n}"
            )));
        }
        let mut scale: f64 = 0.0;
        for (k, a) in arcs.iter().enumerate() {
            let finite = a.center.is_finite()
                && a.radius.is_finite()
                && a.start_angle.is_finite()
                && a.end_angle.is_finite();
            if !finite || a.radius <= 0.0 {
                return Err(Error::InvalidSpec(format!("arc {k} has invalid fields")));
            }
            let sweep = a.end_angle - a.start_angle;
            if sweep <= 0.0 || sweep >= PI {
                return Err(Error::InvalidSpec(format!(
                    "arc {k} must sweep counterclockwise by less than pi (sweep {sweep})"
                )));
            }
            if a.center.length() >= a.radius {
                return Err(Error::InvalidSpec(format!(
                    "origin lies outside the circle of arc {k}"
                )));
            }
            scale = scale.max(a.start().length()).max(a.end().length());
        }
        let tol = 1e-9 * scale.max(1.0);

        for k in 0..n {
            let gap = arcs[k].end().euclidean_distance(arcs[(k + 1) % n].start());
            if gap > tol {
                return Err(Error::InvalidSpec(format!(
                    "arc {k} does not connect to arc {} (gap {gap:e})",
                    (k + 1) % n
                )));
            }
        }

        // Rotate so the start polar angles ascend from the smallest one.
        let polar: Vec<f64> = arcs
            .iter()
            .map(|a| a.start().angle().rem_euclid(TAU))
            .collect();
        let first = (0..n)
            .min_by(|&i, &j| polar[i].total_cmp(&polar[j]))
            .expect("non-empty");
        let arcs: Vec<CircularArc> = (0..n).map(|k| arcs[(first + k) % n]).collect();
        let starts: Vec<f64> = (0..n).map(|k| polar[(first + k) % n]).collect();

        let mut winding = 0.0;
        for k in 0..n {
            let a = &arcs[k];
            let swept = a.end().angle() - a.start().angle();
            winding += swept.rem_euclid(TAU);
            if k + 1 < n && starts[k + 1] <= starts[k] {
                return Err(Error::InvalidSpec(
                    "arc start angles are not in counterclockwise order".into(),
                ));
            }
        }
        if (winding - TAU).abs() > 1e-6 {
            return Err(Error::InvalidSpec(format!(
                "boundary winds {:.6} turns around the origin, expected 1",
                winding / TAU
            )));
        }

        let half = n / 2;
        for k in 0..half {
            let a = arcs[k].negated();
            let b = arcs[k + half];
            let same = a.center.euclidean_distance(b.center) <= tol
                && (a.radius - b.radius).abs() <= tol
                && a.start().euclidean_distance(b.start()) <= tol
                && a.end().euclidean_distance(b.end()) <= tol;
            if !same {
                return Err(Error::InvalidSpec(format!(
                    "arc {k} has no centrally symmetric partner"
                )));
            }
        }

        for k in 0..n {
            let a = &arcs[k];
            let b = &arcs[(k + 1) % n];
            let t_in = (a.end() - a.center).perp().normalized();
            let t_out = (b.start() - b.center).perp().normalized();
            if t_in.cross(t_out) < -1e-12 {
                return Err(Error::InvalidSpec(format!(
                    "boundary turns clockwise at the junction after arc {k}"
                )));
            }
        }

        let body = ArcBody { arcs, starts };
        let margin = body.sampled_margin(StrictnessConfig::default().samples);
        if margin <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "arc body is not strictly convex (sampled margin {margin:e})"
            )));
        }
        Ok(body)
    }

    /// Arcs in canonical order (ascending start polar angle).
    pub fn arcs(&self) -> &[CircularArc] {
        &self.arcs
    }

    fn arc_for(&self, theta: f64) -> &CircularArc {
        let t = theta.rem_euclid(TAU);
        let k = self.starts.partition_point(|&s| s <= t);
        if k == 0 {
            self.arcs.last().expect("non-empty")
        } else {
            &self.arcs[k - 1]
        }
    }

    pub fn radial(&self, theta: f64) -> f64 {
        let dir = Point::from_angle(theta);
        self.arc_for(theta).ray_hit(dir)
    }

    fn radial_dir(&self, dir: Point) -> f64 {
        self.arc_for(dir.angle()).ray_hit(dir)
    }

    /// Lower bound on the inradius: each arc's circle contains the origin, so
    /// the arc is at least `radius − |center|` away from it.
    pub fn inradius_bound(&self) -> f64 {
        self.arcs
            .iter()
            .map(|a| a.radius - a.center.length())
            .fold(f64::INFINITY, f64::min)
    }

    fn sampled_margin(&self, samples: usize) -> f64 {
        sampled_margin(|theta| self.radial(theta), samples)
    }
}

/// The variants a [`NormSpec`] can take.
#[derive(Debug, Clone, PartialEq)]
pub enum NormKind {
    Lp(f64),
    L1,
    Linf,
    Arcs(ArcBody),
}

/// A validated unit-ball description. Construct with [`NormSpec::lp`],
/// [`NormSpec::l1`], [`NormSpec::linf`], [`NormSpec::arcs`], or
/// `TryFrom<NormKind>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormSpecJson", into = "NormSpecJson")]
pub struct NormSpec {
    kind: NormKind,
}

impl NormSpec {
    pub fn lp(p: f64) -> Result<NormSpec> {
        if !(p.is_finite() && p > 1.0 && p <= MAX_LP_EXPONENT) {
            return Err(Error::InvalidSpec(format!(
                "L_p exponent must lie in (1, {MAX_LP_EXPONENT}], got {p}"
            )));
        }
        Ok(NormSpec {
            kind: NormKind::Lp(p),
        })
    }

    pub fn euclidean() -> NormSpec {
        NormSpec {
            kind: NormKind::Lp(2.0),
        }
    }

    pub fn l1() -> NormSpec {
        NormSpec { kind: NormKind::L1 }
    }

    pub fn linf() -> NormSpec {
        NormSpec {
            kind: NormKind::Linf,
        }
    }

    pub fn arcs(body: ArcBody) -> NormSpec {
        NormSpec {
            kind: NormKind::Arcs(body),
        }
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    /// Whether the unit ball is strictly convex. Decided by variant: `L_p`
    /// for `1 < p < ∞` and every valid arc body are strict.
    pub fn is_strict(&self) -> bool {
        matches!(self.kind, NormKind::Lp(_) | NormKind::Arcs(_))
    }

    pub fn norm(&self, v: Point) -> f64 {
        if v.x == 0.0 && v.y == 0.0 {
            return 0.0;
        }
        match &self.kind {
            NormKind::Lp(p) => lp_norm(v, *p),
            NormKind::L1 => v.x.abs() + v.y.abs(),
            NormKind::Linf => v.x.abs().max(v.y.abs()),
            NormKind::Arcs(body) => {
                let len = v.length();
                len / body.radial_dir(v * (1.0 / len))
            }
        }
    }

    #[inline]
    pub fn distance(&self, p: Point, q: Point) -> f64 {
        self.norm(q - p)
    }

    /// Euclidean distance from the origin to the boundary of the unit ball in
    /// direction `theta`.
    pub fn radial(&self, theta: f64) -> f64 {
        match &self.kind {
            NormKind::Arcs(body) => body.radial(theta),
            _ => 1.0 / self.norm(Point::from_angle(theta)),
        }
    }

    /// Lower bound on the Euclidean inradius of the unit ball. Its reciprocal
    /// bounds the Lipschitz constant of the norm with respect to Euclidean
    /// displacement.
    pub fn inradius_bound(&self) -> f64 {
        match &self.kind {
            NormKind::Lp(p) => 1.0_f64.min(2.0_f64.powf(0.5 - 1.0 / p)),
            NormKind::L1 => std::f64::consts::FRAC_1_SQRT_2,
            NormKind::Linf => 1.0,
            NormKind::Arcs(body) => body.inradius_bound(),
        }
    }

    /// Sampled convexity margin of the unit ball boundary.
    ///
    /// For `N` equally spaced directions, the boundary point of each
    /// direction is compared against the chord through its two angular
    /// neighbors; the sag beyond the chord divided by the squared chord length
    /// is minimized over all triples. `L1` and `L∞` report 0.
    ///
    /// The sample spacing cannot resolve high-order contact: `L_p` balls with
    /// large `p` are strictly convex yet sag by less than rounding error near
    /// the axes, so their margin can be ~0. [`NormSpec::is_strict`] is the
    /// authoritative flag for `L_p`.
    pub fn strictness_margin(&self, config: &StrictnessConfig) -> f64 {
        match &self.kind {
            NormKind::L1 | NormKind::Linf => 0.0,
            _ => sampled_margin(|t| self.radial(t), config.samples),
        }
    }

    pub fn accepts_as_strict(&self, config: &StrictnessConfig) -> bool {
        self.strictness_margin(config) > config.tolerance
    }
}

fn lp_norm(v: Point, p: f64) -> f64 {
    if p == 2.0 {
        return v.x.hypot(v.y);
    }
    let ax = v.x.abs();
    let ay = v.y.abs();
    let m = ax.max(ay);
    let (a, b) = (ax / m, ay / m);
    m * (a.powf(p) + b.powf(p)).powf(1.0 / p)
}

fn sampled_margin(radial: impl Fn(f64) -> f64, samples: usize) -> f64 {
    let n = samples.max(3);
    let pts: Vec<Point> = (0..n)
        .map(|k| {
            let theta = TAU * k as f64 / n as f64;
            Point::from_angle(theta) * radial(theta)
        })
        .collect();
    (0..n)
        .map(|k| {
            let prev = pts[(k + n - 1) % n];
            let next = pts[(k + 1) % n];
            let chord = next - prev;
            let sag = -chord.cross(pts[k] - prev) / chord.length();
            sag / chord.length()
        })
        .fold(f64::INFINITY, f64::min)
}

impl TryFrom<NormKind> for NormSpec {
    type Error = Error;

    fn try_from(kind: NormKind) -> Result<NormSpec> {
        match kind {
            NormKind::Lp(p) => NormSpec::lp(p),
            other => Ok(NormSpec { kind: other }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcJson {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
    pub a0: f64,
    pub a1: f64,
}

/// Wire form of [`NormSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum NormSpecJson {
    Lp { p: f64 },
    L1,
    Linf,
    Arcs { arcs: Vec<ArcJson> },
}

impl TryFrom<NormSpecJson> for NormSpec {
    type Error = Error;

    fn try_from(json: NormSpecJson) -> Result<NormSpec> {
        match json {
            NormSpecJson::Lp { p } => NormSpec::lp(p),
            NormSpecJson::L1 => Ok(NormSpec::l1()),
            NormSpecJson::Linf => Ok(NormSpec::linf()),
            NormSpecJson::Arcs { arcs } => {
                let arcs = arcs
                    .into_iter()
                    .map(|a| CircularArc {
                        center: Point::new(a.cx, a.cy),
                        radius: a.r,
                        start_angle: a.a0,
                        end_angle: a.a1,
                    })
                    .collect();
                Ok(NormSpec::arcs(ArcBody::new(arcs)?))
            }
        }
    }
}

impl From<NormSpec> for NormSpecJson {
    fn from(spec: NormSpec) -> NormSpecJson {
        match spec.kind {
            NormKind::Lp(p) => NormSpecJson::Lp { p },
            NormKind::L1 => NormSpecJson::L1,
            NormKind::Linf => NormSpecJson::Linf,
            NormKind::Arcs(body) => NormSpecJson::Arcs {
                arcs: body
                    .arcs
                    .iter()
                    .map(|a| ArcJson {
                        cx: a.center.x,
                        cy: a.center.y,
                        r: a.radius,
                        a0: a.start_angle,
                        a1: a.end_angle,
                    })
                    .collect(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    /// Smallest `s` with `v ∈ s·K`, by bisection on the scale using only the
    /// membership test `|x|^p + |y|^p <= s^p`.
    fn lp_norm_by_bisection(v: Point, p: f64) -> f64 {
        let inside = |s: f64| (v.x.abs() / s).powf(p) + (v.y.abs() / s).powf(p) <= 1.0;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while !inside(hi) {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }


    #[test]
    fn euclidean_and_l1_examples() {
        assert_eq!(NormSpec::euclidean().norm(Point::new(3.0, 4.0)), 5.0);
        assert_eq!(NormSpec::l1().norm(Point::new(2.0, 3.0)), 5.0);
        assert_eq!(
            NormSpec::euclidean().distance(Point::ORIGIN, Point::new(3.0, 4.0)),
            5.0
        );
        assert_eq!(
            NormSpec::l1().distance(Point::ORIGIN, Point::new(2.0, 3.0)),
            5.0
        );
    }

    #[test]
    fn l4_matches_bisection_oracle() {
        let spec = NormSpec::lp(4.0).unwrap();
        let v = Point::new(1.0, 1.0);
        let closed = spec.norm(v);
        let oracle = lp_norm_by_bisection(v, 4.0);
        assert!((closed - 1.189207115002721).abs() < 1e-12);
        assert!((closed - oracle).abs() < 1e-12, "{closed} vs {oracle}");
        for &(x, y, p) in &[(0.3, -2.0, 1.5), (-5.0, 0.25, 7.0), (1.0, 3.0, 3.3)] {
            let v = Point::new(x, y);
            let n = NormSpec::lp(p).unwrap().norm(v);
            assert!((n - lp_norm_by_bisection(v, p)).abs() < 1e-12 * n.max(1.0));
        }
    }

    #[test]
    fn radial_examples() {
        let e = NormSpec::euclidean();
        for k in 0..16 {
            assert!((e.radial(k as f64 * 0.4) - 1.0).abs() < 1e-15);
        }
        let l1 = NormSpec::l1();
        assert!((l1.radial(0.0) - 1.0).abs() < 1e-15);
        assert!((l1.radial(FRAC_PI_4) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);

        let l4 = NormSpec::lp(4.0).unwrap();
        let r = l4.radial(FRAC_PI_4);
        // The boundary point along v = (1,1) is v/‖v‖, so ρ is its length.
        let v = Point::new(1.0, 1.0);
        assert!(((v * (1.0 / l4.norm(v))).length() - r).abs() < 1e-12);
        assert!((r - 2.0_f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn lp_exponent_range() {
        assert!(NormSpec::lp(1.0).is_err());
        assert!(NormSpec::lp(0.5).is_err());
        assert!(NormSpec::lp(64.5).is_err());
        assert!(NormSpec::lp(f64::NAN).is_err());
        assert!(NormSpec::lp(64.0).is_ok());
        assert!(NormSpec::lp(1.01).is_ok());
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        for spec in [NormSpec::euclidean(), NormSpec::l1(), NormSpec::linf()] {
            assert_eq!(spec.norm(Point::ORIGIN), 0.0);
        }
        let body = ArcBody::new(rounded_polygon(3, 5.0)).unwrap();
        assert_eq!(NormSpec::arcs(body).norm(Point::ORIGIN), 0.0);
    }

    #[test]
    fn strictness_margins() {
        let cfg = StrictnessConfig::default();
        assert!(NormSpec::euclidean().strictness_margin(&cfg) > cfg.tolerance);
        assert_eq!(NormSpec::l1().strictness_margin(&cfg), 0.0);
        assert_eq!(NormSpec::linf().strictness_margin(&cfg), 0.0);
        assert!(!NormSpec::l1().accepts_as_strict(&cfg));
        let body = ArcBody::new(rounded_polygon(4, 3.0)).unwrap();
        assert!(NormSpec::arcs(body).strictness_margin(&cfg) > cfg.tolerance);
        assert!(NormSpec::lp(3.0).unwrap().strictness_margin(&cfg) > 0.0);
    }

    #[test]
    fn arc_body_radial_hits_vertices() {
        let arcs = rounded_polygon(3, 4.0);
        let body = ArcBody::new(arcs.clone()).unwrap();
        for a in &arcs {
            let v = a.start();
            assert!((body.radial(v.angle()) - v.length()).abs() < 1e-12);
        }
        // Arcs bulge past the chord.
        let mid_theta = TAU / 12.0;
        assert!(body.radial(mid_theta) > (TAU / 12.0).cos());
        assert!(body.radial(mid_theta) < 1.0);
    }

    #[test]
    fn arc_body_is_rotation_invariant_in_input_order() {
        let mut arcs = rounded_polygon(3, 4.0);
        let a = ArcBody::new(arcs.clone()).unwrap();
        arcs.rotate_left(2);
        let b = ArcBody::new(arcs).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn arc_body_rejects_broken_inputs() {
        let arcs = rounded_polygon(3, 4.0);
        // Gap between arcs.
        let mut gap = arcs.clone();
        gap[1].start_angle += 0.01;
        assert!(ArcBody::new(gap).is_err());
        // Odd count.
        assert!(ArcBody::new(arcs[..5].to_vec()).is_err());
        // Asymmetric: shrink one arc and its neighbours stay put.
        let mut asym = arcs.clone();
        asym[0].radius *= 1.5;
        assert!(ArcBody::new(asym).is_err());
        // Clockwise arc.
        let mut cw = arcs.clone();
        let a0 = &mut cw[0];
        std::mem::swap(&mut a0.start_angle, &mut a0.end_angle);
        assert!(ArcBody::new(cw).is_err());
        // Arcs bulge so far that the junctions turn clockwise.
        assert!(ArcBody::new(rounded_polygon(3, 0.6)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let specs = vec![
            NormSpec::lp(3.5).unwrap(),
            NormSpec::l1(),
            NormSpec::linf(),
            NormSpec::arcs(ArcBody::new(rounded_polygon(2, 2.0)).unwrap()),
        ];
        for spec in specs {
            let text = serde_json::to_string(&spec).unwrap();
            let back: NormSpec = serde_json::from_str(&text).unwrap();
            assert_eq!(back, spec);
        }
        let e: NormSpec = serde_json::from_str(r#"{"type":"lp","p":2.0}"#).unwrap();
        assert_eq!(e, NormSpec::euclidean());
        assert!(serde_json::from_str::<NormSpec>(r#"{"type":"lp","p":100.0}"#).is_err());
    }
}

