//! Rational-distance points on the unit circle from a Pythagorean triple.
//!
//! With `q = a/c + i·b/c`, the powers `q^{2j}` lie on the unit circle and
//! `|q^{2j} − q^{2k}| = 2·|Im q^{k−j}|`, a rational number. Odd powers
//! would give chords `2·|sin(mθ/2)|`, which are not rational in general.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PythagoreanTriple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl PythagoreanTriple {
    pub fn new(a: u64, b: u64, c: u64) -> Result<PythagoreanTriple> {
        let sq = |x: u64| x as u128 * x as u128;
        if a == 0 || b == 0 || sq(a) + sq(b) != sq(c) {
            return Err(Error::NotPythagorean { a, b, c });
        }
        Ok(PythagoreanTriple { a, b, c })
    }
}

/// A complex number with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoint {
    pub x: BigRational,
    pub y: BigRational,
}

impl RationalPoint {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        RationalPoint { x, y }
    }

    pub fn zero() -> Self {
        RationalPoint::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        RationalPoint::new(BigRational::one(), BigRational::zero())
    }

    pub fn mul(&self, o: &RationalPoint) -> RationalPoint {
        RationalPoint::new(
            &self.x * &o.x - &self.y * &o.y,
            &self.x * &o.y + &self.y * &o.x,
        )
    }

    pub fn squared_distance(&self, o: &RationalPoint) -> BigRational {
        let dx = &self.x - &o.x;
        let dy = &self.y - &o.y;
        &dx * &dx + &dy * &dy
    }

    pub fn to_point(&self) -> Point {
        Point::new(ratio_to_f64(&self.x), ratio_to_f64(&self.y))
    }

    pub fn scaled(&self, s: &BigInt) -> RationalPoint {
        let s = BigRational::from_integer(s.clone());
        RationalPoint::new(&self.x * &s, &self.y * &s)
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    // Divide in floating point after shrinking huge parts, which would
    // otherwise overflow to infinity.
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPointSet {
    pub points: Vec<RationalPoint>,
    /// Multiplying every point by `scale` makes all distances integers.
    pub scale: BigInt,
}

impl RationalPointSet {
    /// Exact pairwise distances of the unscaled points.
    pub fn distances(&self) -> Result<Vec<Vec<BigRational>>> {
        let n = self.points.len();
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let sq = self.points[i].squared_distance(&self.points[j]);
                let d = rational_sqrt(&sq).ok_or_else(|| {
                    Error::ConstructionFailed(format!("distance {i}-{j} is irrational"))
                })?;
                m[i][j] = d.clone();
                m[j][i] = d;
            }
        }
        Ok(m)
    }

    pub fn scaled_points(&self) -> Vec<RationalPoint> {
        self.points.iter().map(|p| p.scaled(&self.scale)).collect()
    }

    pub fn to_points(&self, scaled: bool) -> Vec<Point> {
        if scaled {
            self.scaled_points().iter().map(RationalPoint::to_point).collect()
        } else {
            self.points.iter().map(RationalPoint::to_point).collect()
        }
    }

    /// Distances of the scaled points, which must be positive integers.
    pub fn integer_distances(&self) -> Result<Vec<Vec<BigInt>>> {
        let scale = BigRational::from_integer(self.scale.clone());
        let d = self.distances()?;
        let mut out = Vec::with_capacity(d.len());
        for (i, row) in d.iter().enumerate() {
            let mut r = Vec::with_capacity(row.len());
            for (j, v) in row.iter().enumerate() {
                let s = v * &scale;
                if !s.is_integer() || (i != j && !s.is_positive()) {
                    return Err(Error::NotIntegerDistanceSet {
                        worst: ratio_to_f64(&(&s - s.floor())),
                    });
                }
                r.push(s.to_integer());
            }
            out.push(r);
        }
        Ok(out)
    }

    /// Exact check, with no tolerance, that the scaled set has positive
    /// integer distances.
    pub fn verify_integer_distances_exact(&self) -> bool {
        self.integer_distances().is_ok()
    }
}

/// `q^{2j}` for `j = 0..n`, optionally with the center of the circle.
pub fn pythagorean_circle_set(
    t: PythagoreanTriple,
    n: usize,
    include_center: bool,
) -> Result<RationalPointSet> {
    let t = PythagoreanTriple::new(t.a, t.b, t.c)?;
    if n + usize::from(include_center) < 2 || n == 0 {
        return Err(Error::InvalidInput(format!(
            "need at least two points (n = {n}, center = {include_center})"
        )));
    }
    let c = BigInt::from(t.c);
    let q = RationalPoint::new(
        BigRational::new(BigInt::from(t.a), c.clone()),
        BigRational::new(BigInt::from(t.b), c),
    );
    let q2 = q.mul(&q);
    let mut points = Vec::with_capacity(n + 1);
    let mut cur = RationalPoint::one();
    for _ in 0..n {
        points.push(cur.clone());
        cur = cur.mul(&q2);
    }
    if include_center {
        points.push(RationalPoint::zero());
    }
    let mut set = RationalPointSet {
        points,
        scale: BigInt::one(),
    };
    let mut scale = BigInt::one();
    for row in set.distances()? {
        for d in row {
            scale = scale.lcm(d.denom());
        }
    }
    set.scale = scale;
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn t345() -> PythagoreanTriple {
        PythagoreanTriple::new(3, 4, 5).unwrap()
    }

    /// `Im(q^m)` by repeated multiplication, independent of the point set.
    fn im_power(t: PythagoreanTriple, m: usize) -> BigRational {
        let q = RationalPoint::new(r(t.a as i64, t.c as i64), r(t.b as i64, t.c as i64));
        let mut p = RationalPoint::one();
        for _ in 0..m {
            p = p.mul(&q);
        }
        p.y
    }

    #[test]
    fn rejects_non_triples() {
        assert_eq!(
            PythagoreanTriple::new(3, 4, 6),
            Err(Error::NotPythagorean { a: 3, b: 4, c: 6 })
        );
        assert!(PythagoreanTriple::new(0, 5, 5).is_err());
        assert!(PythagoreanTriple::new(5, 12, 13).is_ok());
    }

    #[test]
    fn two_points_of_345() {
        let s = pythagorean_circle_set(t345(), 2, false).unwrap();
        assert_eq!(s.points[1], RationalPoint::new(r(-7, 25), r(24, 25)));
        let d = s.distances().unwrap();
        assert_eq!(d[0][1], r(8, 5));
        assert_eq!(s.scale, BigInt::from(5));
        assert_eq!(s.integer_distances().unwrap()[0][1], BigInt::from(8));
    }

    #[test]
    fn radius_to_center_is_one() {
        let s = pythagorean_circle_set(t345(), 1, true).unwrap();
        assert_eq!(s.distances().unwrap()[0][1], r(1, 1));
        assert!(pythagorean_circle_set(t345(), 1, false).is_err());
    }

    #[test]
    fn chords_match_imaginary_parts() {
        for t in [t345(), PythagoreanTriple::new(5, 12, 13).unwrap()] {
            let s = pythagorean_circle_set(t, 6, false).unwrap();
            let d = s.distances().unwrap();
            for j in 0..6 {
                for k in j + 1..6 {
                    let expect = im_power(t, k - j).abs() * r(2, 1);
                    assert_eq!(d[j][k], expect, "{t:?} {j} {k}");
                }
            }
        }
    }

    #[test]
    fn points_lie_on_unit_circle() {
        let s = pythagorean_circle_set(t345(), 6, false).unwrap();
        for p in &s.points {
            assert_eq!(&p.x * &p.x + &p.y * &p.y, BigRational::one());
        }
    }

    #[test]
    fn scaled_sets_are_exact_integer_sets() {
        for n in 2..=6 {
            for center in [false, true] {
                let s = pythagorean_circle_set(t345(), n, center).unwrap();
                assert!(s.verify_integer_distances_exact(), "n={n} center={center}");
                // The scale is the smallest one that works.
                let d = s.distances().unwrap();
                let lcm = d
                    .iter()
                    .flatten()
                    .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                assert_eq!(s.scale, lcm);
            }
        }
    }

    #[test]
    fn rational_sqrt_detects_squares() {
        assert_eq!(rational_sqrt(&r(64, 25)), Some(r(8, 5)));
        assert_eq!(rational_sqrt(&r(2, 1)), None);
        assert_eq!(rational_sqrt(&r(-4, 1)), None);
    }
}
