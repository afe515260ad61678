//! Star-polygon geometry on the unit circle.
//!
//! Vertices of an `{n/m}` star polygon sit at `(sin θ, cos θ)` with
//! `θ = 2πk/n`, so vertex 0 is the top of the circle. Everything else in this
//! module is closed-form: the osculation ratio `P(n, m)` of the vertex maps,
//! the admissible densities that keep the copies from crossing, and the
//! ratios/angles available to a map contracting toward the center.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Counter-clockwise rotation about the origin.
    pub fn rotated(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, rhs: f64) -> Point {
        Point::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

/// Drawing density `m` of a star polygon, stored in half steps so that the
/// spoke figure `{n/(n/2)}` for odd `n` is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Density {
    halves: u32,
}

impl Density {
    pub const fn integer(m: u32) -> Self {
        Density { halves: 2 * m }
    }

    /// Density with value `halves / 2`.
    pub const fn from_halves(halves: u32) -> Self {
        Density { halves }
    }

    pub fn halves(self) -> u32 {
        self.halves
    }

    pub fn value(self) -> f64 {
        f64::from(self.halves) / 2.0
    }

    pub fn as_integer(self) -> Option<u32> {
        self.halves.is_multiple_of(2).then_some(self.halves / 2)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(m) => write!(f, "{m}"),
            None => write!(f, "{}.5", self.halves / 2),
        }
    }
}

impl FromStr for Density {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("'{s}' is not an integer or half-integer density"));
        match s.split_once('.') {
            None => s.parse::<u32>().map(Density::integer).map_err(|_| bad()),
            Some((whole, frac)) => {
                let whole: u32 = whole.parse().map_err(|_| bad())?;
                match frac.trim_end_matches('0') {
                    "" => Ok(Density::integer(whole)),
                    "5" => Ok(Density::from_halves(2 * whole + 1)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

/// The `{n/m}` star polygon inscribed in the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarPolygon {
    n: u32,
    m: Density,
}

impl StarPolygon {
    pub fn new(n: u32, m: Density) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices(n));
        }
        let valid = match m.as_integer() {
            Some(m) => m >= 1 && 2 * m <= n,
            // half-integer densities only describe the odd spoke star
            None => m.halves() == n,
        };
        if !valid {
            return Err(Error::DensityOutOfRange { n, m: m.value() });
        }
        Ok(StarPolygon { n, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn density(&self) -> Density {
        self.m
    }

    pub fn vertices(&self) -> Vec<Point> {
        vertices(self.n)
    }
}

impl fmt::Display for StarPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}/{}}}", self.n, self.m)
    }
}

fn snap(v: f64) -> f64 {
    if v.abs() < 1e-15 {
        0.0
    } else {
        v
    }
}

/// Vertex `k` of the regular `n`-gon on the unit circle, clockwise from the top.
pub fn vertex(n: u32, k: u32) -> Point {
    let theta = 2.0 * PI * f64::from(k % n) / f64::from(n);
    Point::new(snap(theta.sin()), snap(theta.cos()))
}

pub fn vertices(n: u32) -> Vec<Point> {
    (0..n).map(|k| vertex(n, k)).collect()
}

/// Contraction ratio `P(n, m) = sin(π/n) / (2 cos((m-1)π/n) sin(mπ/n))` that
/// makes the copies of an `{n/m}` star polygon scaled toward its vertices
/// meet along the secants of the original.
pub fn contraction_ratio(n: u32, m: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::TooFewVertices(n));
    }
    if m < 1 || 2 * m > n {
        return Err(Error::DensityOutOfRange { n, m: f64::from(m) });
    }
    Ok(contraction_ratio_real(f64::from(n), f64::from(m)))
}

/// Same formula over the reals, for sweeps where `n` does not fit an integer
/// (the `n = 1e308` asymptote). No validation.
pub fn contraction_ratio_real(n: f64, m: f64) -> f64 {
    let step = PI / n;
    step.sin() / (2.0 * ((m - 1.0) * step).cos() * (m * step).sin())
}

/// Integer densities in `[n/4, n/4 + 1]`, the range for which the copies do
/// not cross each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalDensity {
    pub low: u32,
    /// Present only when `4 | n`; the ratio is the same for both values.
    pub high: Option<u32>,
}

impl CanonicalDensity {
    pub fn m(&self) -> u32 {
        self.low
    }

    pub fn values(&self) -> Vec<u32> {
        std::iter::once(self.low).chain(self.high).collect()
    }

    pub fn contains(&self, m: u32) -> bool {
        m == self.low || Some(m) == self.high
    }
}

pub fn canonical_m(n: u32) -> Result<CanonicalDensity> {
    if n < 2 {
        return Err(Error::TooFewVertices(n));
    }
    let low = n.div_ceil(4);
    let high = n.is_multiple_of(4).then_some(n / 4 + 1);
    Ok(CanonicalDensity { low, high })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CenterFamily {
    /// Ratio `OL^l/OA`.
    L,
    /// Ratio `OM^l/OA`, paired with a rotation of `π/n`.
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CenterRotation {
    None,
    /// `π/n`
    HalfStep,
    /// The osculation angle `γ(n, m, l)`.
    Gamma,
    Radians(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterMapSpec {
    pub family: CenterFamily,
    pub l: u32,
    pub rotation: CenterRotation,
}

impl CenterMapSpec {
    pub fn new(family: CenterFamily, l: u32, rotation: CenterRotation) -> Self {
        CenterMapSpec {
            family,
            l,
            rotation,
        }
    }

    pub fn ratio(&self, n: u32, p: f64) -> Result<f64> {
        match self.family {
            CenterFamily::L => center_ratio_l_for(n, p, self.l),
            CenterFamily::M => center_ratio_m_for(n, p, self.l),
        }
    }

    pub fn rotation_angle(&self, n: u32, p: f64) -> Result<f64> {
        match self.rotation {
            CenterRotation::None => Ok(0.0),
            CenterRotation::HalfStep => Ok(PI / f64::from(n)),
            CenterRotation::Gamma => gamma_for(n, p, self.l),
            CenterRotation::Radians(r) => Ok(r),
        }
    }
}

fn check_center_index(n: u32, l: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewVertices(n));
    }
    if l > n || l % 2 != n % 2 {
        return Err(Error::ParityViolation { n, l });
    }
    Ok(())
}

/// `OM^l/OA = (1 - P - P cos(lπ/n)) / cos(π/n)`.
pub fn center_ratio_m(n: u32, m: u32, l: u32) -> Result<f64> {
    center_ratio_m_for(n, contraction_ratio(n, m)?, l)
}

/// [`center_ratio_m`] for an explicit vertex ratio `p`.
pub fn center_ratio_m_for(n: u32, p: f64, l: u32) -> Result<f64> {
    check_center_index(n, l)?;
    let n = f64::from(n);
    let a = f64::from(l) * PI / n;
    Ok((1.0 - p - p * a.cos()) / (PI / n).cos())
}

/// `OL^l/OA = sqrt(2P(P - 1)(1 + cos(lπ/n)) + 1)`.
pub fn center_ratio_l(n: u32, m: u32, l: u32) -> Result<f64> {
    center_ratio_l_for(n, contraction_ratio(n, m)?, l)
}

pub fn center_ratio_l_for(n: u32, p: f64, l: u32) -> Result<f64> {
    check_center_index(n, l)?;
    let a = f64::from(l) * PI / f64::from(n);
    let sq = 2.0 * p * (p - 1.0) * (1.0 + a.cos()) + 1.0;
    // sq >= (1 - 2p)^2 >= 0 mathematically; clamp rounding noise only
    Ok(sq.max(0.0).sqrt())
}

/// Angle `γ(n, m, l) = ∠O¹OL^l` at which a center copy touches the vertex copies.
pub fn gamma(n: u32, m: u32, l: u32) -> Result<f64> {
    gamma_for(n, contraction_ratio(n, m)?, l)
}

pub fn gamma_for(n: u32, p: f64, l: u32) -> Result<f64> {
    check_center_index(n, l)?;
    if l == 0 {
        return Ok(0.0);
    }
    let a = f64::from(l) * PI / f64::from(n);
    let num = p * a.sin();
    let den = 1.0 - p - p * a.cos();
    if num.abs() < 1e-15 && den.abs() < 1e-15 {
        return Err(Error::DegenerateGeometry(format!(
            "gamma undefined for n = {n}, l = {l}, P = {p}"
        )));
    }
    Ok(num.atan2(den))
}

impl FromStr for CenterRotation {
    type Err = Error;

    /// `none`, `half` (π/n), `gamma` or an angle in radians.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" | "0" => Ok(CenterRotation::None),
            "half" => Ok(CenterRotation::HalfStep),
            "gamma" => Ok(CenterRotation::Gamma),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|r| r.is_finite())
                .map(CenterRotation::Radians)
                .ok_or_else(|| {
                    Error::Parse(format!(
                        "expected none, half, gamma or radians, got '{other}'"
                    ))
                }),
        }
    }
}

/// Parses `none`, `L:<l>` or `M:<l>`.
pub fn parse_center(s: &str) -> Result<Option<(CenterFamily, u32)>> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("none") {
        return Ok(None);
    }
    let (family, l) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("expected none, L:<l> or M:<l>, got '{s}'")))?;
    let family = match family {
        "L" | "l" => CenterFamily::L,
        "M" | "m" => CenterFamily::M,
        other => {
            return Err(Error::Parse(format!(
                "unknown center family '{other}' (use L or M)"
            )))
        }
    };
    let l = l
        .parse::<u32>()
        .map_err(|e| Error::Parse(format!("center index '{l}': {e}")))?;
    Ok(Some((family, l)))
}
