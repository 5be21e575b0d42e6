//! JSON documents: point sets, deterministic report emission.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constructions::{ratio_to_f64, RationalPoint, RationalPointSet};
use crate::error::{Error, Result};
use crate::point::Point;

/// Significant digits of every floating-point number in emitted JSON.
pub const JSON_DIGITS: usize = 12;

pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    let r: f64 = s.parse().expect("formatted float parses");
    // Avoid emitting "-0.0".
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Round every non-integer number in `v` to [`JSON_DIGITS`] digits.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_significant(x, JSON_DIGITS)) {
                    *n = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Serialize `value` with rounded numbers, pretty-printed, newline-terminated.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::InvalidInput(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Parse `"a/b"`, an integer, or a decimal string exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("'{s}' is not a rational number"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if frac.contains(['+', '-']) || int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-shift) as usize))
    })
}

pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// One coordinate: a JSON number or an exact string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coord {
    Float(f64),
    Exact(String),
}

impl Coord {
    pub fn to_f64(&self) -> Result<f64> {
        match self {
            Coord::Float(x) => Ok(*x),
            Coord::Exact(s) => Ok(ratio_to_f64(&parse_rational(s)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSetJson {
    pub points: Vec<[Coord; 2]>,
}

impl PointSetJson {
    pub fn from_points(points: &[Point]) -> PointSetJson {
        PointSetJson {
            points: points.iter().map(|p| [Coord::Float(p.x), Coord::Float(p.y)]).collect(),
        }
    }

    pub fn from_rational(points: &[RationalPoint]) -> PointSetJson {
        PointSetJson {
            points: points
                .iter()
                .map(|p| [Coord::Exact(format_rational(&p.x)), Coord::Exact(format_rational(&p.y))])
                .collect(),
        }
    }

    pub fn to_points(&self) -> Result<Vec<Point>> {
        self.points
            .iter()
            .map(|[x, y]| Ok(Point::new(x.to_f64()?, y.to_f64()?)))
            .collect()
    }
}

pub fn parse_point_set(json: &str) -> Result<Vec<Point>> {
    let doc: PointSetJson =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(e.to_string()))?;
    doc.to_points()
}

/// Document for a rational point set: points (exact strings or floats),
/// the scale, and the integer distances of the scaled set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalSetJson {
    pub points: Vec<[Coord; 2]>,
    pub scale: String,
    pub scaled: bool,
    pub integer_distances: Vec<Vec<String>>,
}

pub fn rational_set_json(set: &RationalPointSet, scaled: bool, exact: bool) -> Result<RationalSetJson> {
    let pts = if scaled { set.scaled_points() } else { set.points.clone() };
    let points = if exact {
        PointSetJson::from_rational(&pts).points
    } else {
        PointSetJson::from_points(&pts.iter().map(RationalPoint::to_point).collect::<Vec<_>>()).points
    };
    let integer_distances = set
        .integer_distances()?
        .iter()
        .map(|row| row.iter().map(|d| d.to_string()).collect())
        .collect();
    Ok(RationalSetJson {
        points,
        scale: set.scale.to_string(),
        scaled,
        integer_distances,
    })
}
