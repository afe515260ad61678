//! Iterated function systems built from star polygons.
//!
//! An n-gon system has one contraction toward every vertex of the unit-circle
//! polygon; a flake adds one more map contracting toward the origin, optionally
//! rotated. The center map, when present, is always the last map of the
//! system.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    canonical_m, contraction_ratio, vertex, CenterFamily, CenterMapSpec, CenterRotation, Density,
    Point, StarPolygon,
};
use crate::numfmt;

/// A contracting similarity `x -> v + s R(θ) (x - v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub scale: f64,
    pub rotation: f64,
    pub fixed_point: Point,
}

impl Similarity {
    pub fn new(scale: f64, rotation: f64, fixed_point: Point) -> Self {
        Similarity {
            scale,
            rotation,
            fixed_point,
        }
    }

    pub fn toward(fixed_point: Point, scale: f64) -> Self {
        Similarity::new(scale, 0.0, fixed_point)
    }

    /// Linear part `[[a, b], [c, d]]`.
    pub fn linear(&self) -> [[f64; 2]; 2] {
        let (s, c) = self.rotation.sin_cos();
        let k = self.scale;
        [[k * c, -k * s], [k * s, k * c]]
    }

    pub fn determinant(&self) -> f64 {
        self.scale * self.scale
    }

    pub fn apply(&self, p: Point) -> Point {
        self.fixed_point + (p - self.fixed_point).rotated(self.rotation) * self.scale
    }

    /// Precomputed affine form for tight loops.
    pub fn affine(&self) -> Affine {
        let [[a, b], [c, d]] = self.linear();
        let v = self.fixed_point;
        Affine {
            a,
            b,
            c,
            d,
            e: v.x - (a * v.x + b * v.y),
            f: v.y - (c * v.x + d * v.y),
        }
    }
}

/// `x' = a x + b y + e`, `y' = c x + d y + f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Affine {
    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            self.a * p.x + self.b * p.y + self.e,
            self.c * p.x + self.d * p.y + self.f,
        )
    }
}

/// One step in the coefficient-table form: `x <- A x + (I - A) v`, where the
/// center map first rotates `x` about the origin by `center_rotation`.
///
/// `map` carries the table's linear part; for a center map built by this
/// crate that means a rotation-free copy of it.
pub fn apply_table_step(
    map: &Similarity,
    p: Point,
    is_center: bool,
    center_rotation: f64,
) -> Point {
    let x = if is_center {
        p.rotated(center_rotation)
    } else {
        p
    };
    let [[a, b], [c, d]] = map.linear();
    let v = map.fixed_point;
    Point::new(
        a * x.x + b * x.y + (1.0 - a) * v.x - b * v.y,
        c * x.x + d * x.y - c * v.x + (1.0 - d) * v.y,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ProbabilityRule {
    /// `|det A_i|`, floored at `max / (25 N)`, then normalized.
    #[default]
    Determinant,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsSystem {
    maps: Vec<Similarity>,
    probabilities: Vec<f64>,
    has_center: bool,
}

impl IfsSystem {
    pub fn new(maps: Vec<Similarity>, has_center: bool) -> Result<Self> {
        Self::with_rule(maps, has_center, ProbabilityRule::Determinant)
    }

    pub fn with_rule(
        maps: Vec<Similarity>,
        has_center: bool,
        rule: ProbabilityRule,
    ) -> Result<Self> {
        if maps.len() < 2 {
            return Err(Error::TooFewMaps {
                expected: 2,
                got: maps.len(),
            });
        }
        if let Some(bad) = maps.iter().find(|s| !(s.scale > 0.0 && s.scale < 1.0)) {
            return Err(Error::NonContractive(bad.scale));
        }
        let probabilities = selection_weights(&maps, rule);
        Ok(IfsSystem {
            maps,
            probabilities,
            has_center,
        })
    }

    pub fn with_probability_rule(self, rule: ProbabilityRule) -> Self {
        let probabilities = selection_weights(&self.maps, rule);
        IfsSystem {
            probabilities,
            ..self
        }
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn has_center(&self) -> bool {
        self.has_center
    }

    pub fn scales(&self) -> Vec<f64> {
        self.maps.iter().map(|m| m.scale).collect()
    }

    /// Rotation applied by the center map, 0 without one.
    pub fn center_rotation(&self) -> f64 {
        match (self.has_center, self.maps.last()) {
            (true, Some(map)) => map.rotation,
            _ => 0.0,
        }
    }

    /// `[0, p_1, p_1 + p_2, ..., p_1 + ... + p_{N-1}]`; the number of entries
    /// below a uniform draw picks the map.
    pub fn cumulative_starts(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.probabilities
            .iter()
            .map(|p| {
                let start = acc;
                acc += p;
                start
            })
            .collect()
    }

    /// Coefficient table: two rows `[a b v_x; c d v_y]` per map.
    pub fn to_matrix(&self) -> CoefficientTable {
        let rows = self
            .maps
            .iter()
            .flat_map(|m| {
                let [[a, b], [c, d]] = m.linear();
                let v = m.fixed_point;
                [
                    [clean(a), clean(b), clean(v.x)],
                    [clean(c), clean(d), clean(v.y)],
                ]
            })
            .collect();
        CoefficientTable { rows }
    }
}

fn clean(v: f64) -> f64 {
    if v.abs() < 1e-14 {
        0.0
    } else {
        v
    }
}

fn selection_weights(maps: &[Similarity], rule: ProbabilityRule) -> Vec<f64> {
    let n = maps.len() as f64;
    let raw: Vec<f64> = match rule {
        ProbabilityRule::Uniform => vec![1.0; maps.len()],
        ProbabilityRule::Determinant => {
            let dets: Vec<f64> = maps.iter().map(|m| m.determinant().abs()).collect();
            let max = dets.iter().copied().fold(0.0, f64::max);
            let floor = max / (25.0 * n);
            dets.into_iter().map(|d| d.max(floor)).collect()
        }
    };
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Parameters of a Sierpinski n-gon or n-flake.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlakeSpec {
    pub n: u32,
    /// Density of the drawn initial figure; does not affect the attractor.
    pub m_draw: Density,
    /// Density fed to the contraction-ratio formula.
    pub m_ratio: u32,
    /// Replaces `P(n, m_ratio)` for the special cases that are not osculation ratios.
    pub ratio_override: Option<f64>,
    pub center: Option<CenterMapSpec>,
}

impl FlakeSpec {
    pub fn ngon(n: u32, m: u32) -> Self {
        FlakeSpec {
            n,
            m_draw: Density::integer(m),
            m_ratio: m,
            ratio_override: None,
            center: None,
        }
    }

    /// The n-gon at the (smallest) non-crossing density.
    pub fn canonical(n: u32) -> Result<Self> {
        Ok(Self::ngon(n, canonical_m(n)?.m()))
    }

    /// The standard non-crossing n-flake: `[L^0, 0]` for even `n`,
    /// `[L^1, γ(n, m, 1)]` for odd `n`.
    pub fn standard_flake(n: u32) -> Result<Self> {
        let center = if n.is_multiple_of(2) {
            CenterMapSpec::new(CenterFamily::L, 0, CenterRotation::None)
        } else {
            CenterMapSpec::new(CenterFamily::L, 1, CenterRotation::Gamma)
        };
        Ok(Self::canonical(n)?.with_center(center))
    }

    pub fn with_center(self, center: CenterMapSpec) -> Self {
        FlakeSpec {
            center: Some(center),
            ..self
        }
    }

    pub fn with_ratio(self, ratio: f64) -> Self {
        FlakeSpec {
            ratio_override: Some(ratio),
            ..self
        }
    }

    pub fn with_draw_density(self, m_draw: Density) -> Self {
        FlakeSpec { m_draw, ..self }
    }

    pub fn polygon(&self) -> Result<StarPolygon> {
        StarPolygon::new(self.n, self.m_draw)
    }

    /// Scale of the vertex maps.
    pub fn ratio(&self) -> Result<f64> {
        match self.ratio_override {
            Some(p) => Ok(p),
            None => contraction_ratio(self.n, self.m_ratio),
        }
    }

    /// Whether the vertex ratio is the osculation ratio of a density in
    /// `[n/4, n/4 + 1]`. Advisory: crossing systems are still constructible.
    pub fn is_non_crossing_ngon(&self) -> bool {
        self.ratio_override.is_none()
            && canonical_m(self.n)
                .map(|c| c.contains(self.m_ratio))
                .unwrap_or(false)
    }

    pub fn center_scale(&self) -> Result<Option<f64>> {
        let p = self.ratio()?;
        self.center.map(|c| c.ratio(self.n, p)).transpose()
    }

    /// Center rotation in radians with `Gamma`/`HalfStep` resolved.
    pub fn center_rotation(&self) -> Result<f64> {
        let p = self.ratio()?;
        match self.center {
            Some(c) => c.rotation_angle(self.n, p),
            None => Ok(0.0),
        }
    }
}

impl fmt::Display for FlakeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{{{}/{}}}", self.n, self.m_draw)?;
        if let Some(p) = self.ratio_override {
            write!(f, "(P={p})")?;
        } else if self.m_draw.as_integer() != Some(self.m_ratio) {
            write!(f, "(P=P({},{}))", self.n, self.m_ratio)?;
        }
        if let Some(c) = self.center {
            let family = match c.family {
                CenterFamily::L => "L",
                CenterFamily::M => "M",
            };
            let rot = match c.rotation {
                CenterRotation::None => "0".to_owned(),
                CenterRotation::HalfStep => format!("pi/{}", self.n),
                CenterRotation::Gamma => format!("gamma({},{},{})", self.n, self.m_ratio, c.l),
                CenterRotation::Radians(r) => r.to_string(),
            };
            write!(f, "[{family}{},{rot}]", c.l)?;
        }
        Ok(())
    }
}

/// Order in which vertex maps are listed: counter-clockwise, starting from the
/// first vertex at or below the polar angle `-π/6` (for `n = 9`: vertices
/// 3, 2, 1, 0, 8, 7, 6, 5, 4).
pub fn listing_order(n: u32) -> impl Iterator<Item = u32> {
    let start = n / 3;
    (0..n).map(move |j| (start + n - j) % n)
}

pub fn build_ngon(n: u32, m: u32) -> Result<IfsSystem> {
    build_flake(&FlakeSpec::ngon(n, m))
}

pub fn build_flake(spec: &FlakeSpec) -> Result<IfsSystem> {
    spec.polygon()?;
    let p = spec.ratio()?;
    let mut maps: Vec<Similarity> = listing_order(spec.n)
        .map(|k| Similarity::toward(vertex(spec.n, k), p))
        .collect();
    if let Some(center) = spec.center {
        let scale = center.ratio(spec.n, p)?;
        let rotation = center.rotation_angle(spec.n, p)?;
        maps.push(Similarity::new(scale, rotation, Point::ORIGIN));
    }
    IfsSystem::new(maps, spec.center.is_some())
}

pub const PRESET_NAMES: [&str; 8] = [
    "cantor",
    "sierpinski-triangle",
    "greek-cross",
    "vicsek",
    "sierpinski-pentagon",
    "pentaflake",
    "sierpinski-hexagon",
    "hexaflake",
];

/// The classical fractals that fall out as special cases.
pub fn preset(name: &str) -> Result<FlakeSpec> {
    let no_rotation = |family, l| CenterMapSpec::new(family, l, CenterRotation::None);
    let spec = match name {
        "cantor" => FlakeSpec::ngon(2, 1).with_ratio(1.0 / 3.0),
        "sierpinski-triangle" => FlakeSpec::ngon(3, 1),
        "greek-cross" => FlakeSpec::ngon(4, 2),
        "vicsek" => FlakeSpec::ngon(4, 2)
            .with_ratio(1.0 / 3.0)
            .with_center(no_rotation(CenterFamily::L, 0)),
        "sierpinski-pentagon" => FlakeSpec::ngon(5, 2),
        "pentaflake" => FlakeSpec::ngon(5, 2).with_center(no_rotation(CenterFamily::L, 1)),
        "sierpinski-hexagon" => FlakeSpec::ngon(6, 2),
        "hexaflake" => FlakeSpec::ngon(6, 2).with_center(no_rotation(CenterFamily::L, 0)),
        other => return Err(Error::UnknownPreset(other.to_owned())),
    };
    Ok(spec)
}

/// Whitespace-separated 3-column table, two rows per map.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub rows: Vec<[f64; 3]>,
}

impl CoefficientTable {
    /// Significant digits used by [`fmt::Display`].
    pub const DIGITS: usize = 7;

    pub fn map_count(&self) -> usize {
        self.rows.len() / 2
    }

    /// Rebuilds the maps. Each 2x2 block must be a rotation-scaling.
    pub fn to_system(&self, has_center: bool) -> Result<IfsSystem> {
        let maps = self
            .rows
            .chunks_exact(2)
            .enumerate()
            .map(|(i, pair)| {
                let [a, b, vx] = pair[0];
                let [c, d, vy] = pair[1];
                let tol = 1e-6 * (a.abs() + b.abs() + c.abs() + d.abs()).max(1e-300);
                if (a - d).abs() > tol || (b + c).abs() > tol {
                    return Err(Error::Parse(format!("map {} is not a similarity", i + 1)));
                }
                let scale = (a * d - b * c).sqrt();
                let rotation = c.atan2(a);
                Ok(Similarity::new(scale, rotation, Point::new(vx, vy)))
            })
            .collect::<Result<Vec<_>>>()?;
        IfsSystem::new(maps, has_center)
    }
}

impl fmt::Display for CoefficientTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| numfmt::significant(*v, Self::DIGITS))
                .collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for CoefficientTable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cells: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let row: [f64; 3] = cells.try_into().map_err(|cells: Vec<f64>| {
                Error::Parse(format!(
                    "line {}: expected 3 columns, got {}",
                    lineno + 1,
                    cells.len()
                ))
            })?;
            rows.push(row);
        }
        if rows.len() % 2 != 0 {
            return Err(Error::Parse(format!("odd number of rows ({})", rows.len())));
        }
        Ok(CoefficientTable { rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{center_ratio_l, gamma};
    use std::f64::consts::PI;

    #[test]
    fn ngon_maps_share_the_ratio() {
        let sys = build_ngon(9, 3).unwrap();
        assert_eq!(sys.len(), 9);
        let p = contraction_ratio(9, 3).unwrap();
        assert!(sys.maps().iter().all(|m| m.scale == p && m.rotation == 0.0));
        assert!(!sys.has_center());
        let segment = build_ngon(2, 1).unwrap();
        assert_eq!(segment.scales(), vec![0.5, 0.5]);
    }

    #[test]
    fn listing_order_matches_table_rows() {
        let order: Vec<u32> = listing_order(9).collect();
        assert_eq!(order, vec![3, 2, 1, 0, 8, 7, 6, 5, 4]);
        let mut sorted = listing_order(7).collect::<Vec<_>>();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..7).collect::<Vec<_>>());
    }

    #[test]
    fn hexaflake_has_seven_third_maps() {
        let sys = build_flake(&preset("hexaflake").unwrap()).unwrap();
        assert_eq!(sys.len(), 7);
        for s in sys.scales() {
            assert!((s - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(sys.has_center());
        assert_eq!(sys.maps().last().unwrap().fixed_point, Point::ORIGIN);
    }

    #[test]
    fn gamma_flake_resolves_rotation() {
        let spec = FlakeSpec::ngon(7, 2).with_center(CenterMapSpec::new(
            CenterFamily::L,
            1,
            CenterRotation::Gamma,
        ));
        let sys = build_flake(&spec).unwrap();
        let center = sys.maps().last().unwrap();
        assert_eq!(center.rotation, gamma(7, 2, 1).unwrap());
        assert_eq!(center.scale, center_ratio_l(7, 2, 1).unwrap());
        assert_eq!(sys.center_rotation(), center.rotation);
    }

    #[test]
    fn plane_filling_hexagon_flake() {
        let spec = FlakeSpec::ngon(6, 2).with_center(CenterMapSpec::new(
            CenterFamily::L,
            2,
            CenterRotation::HalfStep,
        ));
        let sys = build_flake(&spec).unwrap();
        let c = sys.maps().last().unwrap();
        assert!((c.scale - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((c.rotation - PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn non_contractive_center_is_rejected() {
        // OL^n = OA: a unit-scale copy
        let spec = FlakeSpec::ngon(7, 2).with_center(CenterMapSpec::new(
            CenterFamily::L,
            7,
            CenterRotation::None,
        ));
        assert!(matches!(build_flake(&spec), Err(Error::NonContractive(_))));
    }

    #[test]
    fn parity_error_propagates() {
        let spec = FlakeSpec::ngon(6, 2).with_center(CenterMapSpec::new(
            CenterFamily::L,
            1,
            CenterRotation::None,
        ));
        assert!(matches!(
            build_flake(&spec),
            Err(Error::ParityViolation { .. })
        ));
    }

    #[test]
    fn presets() {
        let v = preset("vicsek").unwrap();
        assert_eq!(v.n, 4);
        assert_eq!(v.ratio().unwrap(), 1.0 / 3.0);
        assert!((v.center_scale().unwrap().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(v.center_rotation().unwrap(), 0.0);

        let p = preset("pentaflake").unwrap();
        assert_eq!(p.to_string(), "F{5/2}[L1,0]");

        let t = preset("sierpinski-triangle").unwrap();
        assert_eq!(t.ratio().unwrap(), 0.5);
        assert!(t.center.is_none());

        assert!(matches!(preset("koch"), Err(Error::UnknownPreset(_))));
        for name in PRESET_NAMES {
            build_flake(&preset(name).unwrap()).unwrap();
        }
    }

    #[test]
    fn apply_examples() {
        let half = Similarity::toward(Point::new(0.0, 1.0), 0.5);
        assert_eq!(half.apply(Point::new(0.0, -1.0)), Point::new(0.0, 0.0));
        assert_eq!(half.apply(half.fixed_point), half.fixed_point);

        let plain = Similarity::toward(Point::ORIGIN, 1.0 / 3.0);
        let got = apply_table_step(&plain, Point::new(1.0, 0.0), true, PI / 6.0);
        assert!((got.x - (PI / 6.0).cos() / 3.0).abs() < 1e-15);
        assert!((got.y - (PI / 6.0).sin() / 3.0).abs() < 1e-15);

        let rotated = Similarity::new(1.0 / 3.0, PI / 6.0, Point::ORIGIN);
        let direct = rotated.apply(Point::new(1.0, 0.0));
        assert!(direct.distance(got) < 1e-15);
        let affine = rotated.affine().apply(Point::new(1.0, 0.0));
        assert!(affine.distance(got) < 1e-15);
    }

    #[test]
    fn probability_floor() {
        let maps = vec![
            Similarity::toward(Point::new(0.0, 1.0), 0.9),
            Similarity::toward(Point::new(0.0, -1.0), 1e-6),
            Similarity::toward(Point::new(1.0, 0.0), 0.5),
        ];
        let sys = IfsSystem::new(maps, false).unwrap();
        let probs = sys.probabilities();
        let max = probs.iter().copied().fold(0.0, f64::max);
        let min = probs.iter().copied().fold(1.0, f64::min);
        assert!(min >= max / 75.0 * (1.0 - 1e-12));
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(sys.cumulative_starts()[0], 0.0);

        let uniform = sys.with_probability_rule(ProbabilityRule::Uniform);
        assert!(uniform
            .probabilities()
            .iter()
            .all(|p| (p - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn too_few_maps() {
        let one = vec![Similarity::toward(Point::ORIGIN, 0.5)];
        assert!(matches!(
            IfsSystem::new(one, false),
            Err(Error::TooFewMaps { .. })
        ));
    }

    #[test]
    fn matrix_first_rows() {
        let text = build_ngon(9, 2).unwrap().to_matrix().to_string();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("0.2831186 0 0.8660254"));
        assert_eq!(lines.next(), Some("0 0.2831186 -0.5"));
        let table = build_ngon(2, 1).unwrap().to_matrix();
        assert_eq!(table.rows[0][0], 0.5);
    }

    #[test]
    fn matrix_parse_errors() {
        assert!("1 2\n3 4".parse::<CoefficientTable>().is_err());
        assert!("1 0 0".parse::<CoefficientTable>().is_err());
        assert!("0.5 0 x\n0 0.5 1".parse::<CoefficientTable>().is_err());
        let shear: CoefficientTable = "0.5 0.2 0\n0 0.5 1\n0.5 0 0\n0 0.5 -1".parse().unwrap();
        assert!(shear.to_system(false).is_err());
    }
}
