//! Deterministic iteration of the initial star polygon.
//!
//! Depth `k` holds `N^k` scaled copies of the initial figure, one for every
//! word of length `k` over the `N` maps. Depth 1 is also where crossings
//! between copies are detected.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{vertex, Point};
use crate::ifs::{build_flake, FlakeSpec, IfsSystem, Similarity};

pub const MAX_DEPTH: u32 = 8;

/// Upper bound on the number of figures a single iteration may produce.
pub const MAX_FIGURES: u64 = 20_000_000;

/// Distance below which two copies are considered to meet.
pub const TOUCH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Point>,
    pub closed: bool,
}

impl Polyline {
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.points.len();
        let count = match (self.closed, n) {
            (_, 0 | 1) => 0,
            (true, _) => n,
            (false, _) => n - 1,
        };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    fn mapped(&self, map: &Similarity) -> Polyline {
        Polyline {
            points: self.points.iter().map(|&p| map.apply(p)).collect(),
            closed: self.closed,
        }
    }
}

/// One copy of the initial figure; star polygons with `gcd(n, m) > 1` and
/// spoke stars consist of several strokes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure {
    pub strokes: Vec<Polyline>,
}

impl Figure {
    pub fn mapped(&self, map: &Similarity) -> Figure {
        Figure {
            strokes: self.strokes.iter().map(|s| s.mapped(map)).collect(),
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.strokes.iter().flat_map(Polyline::segments)
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.strokes.iter().flat_map(|s| s.points.iter().copied())
    }

    /// Largest distance of a vertex from `center`.
    pub fn radius_about(&self, center: Point) -> f64 {
        self.points()
            .map(|p| p.distance(center))
            .fold(0.0, f64::max)
    }

    fn bounds(&self) -> (Point, Point) {
        self.points().fold(
            (
                Point::new(f64::INFINITY, f64::INFINITY),
                Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            ),
            |(lo, hi), p| {
                (
                    Point::new(lo.x.min(p.x), lo.y.min(p.y)),
                    Point::new(hi.x.max(p.x), hi.y.max(p.y)),
                )
            },
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonSet {
    pub figures: Vec<Figure>,
    pub depth: u32,
}

impl PolygonSet {
    pub fn len(&self) -> usize {
        self.figures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.figures.is_empty()
    }

    /// One `<path>` per figure on the `[-1.05, 1.05]^2` canvas, y pointing up.
    pub fn to_svg(&self) -> String {
        let mut svg = String::from(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-1.05 -1.05 2.1 2.1\" width=\"1000\" height=\"1000\">\n\
             <rect x=\"-1.05\" y=\"-1.05\" width=\"2.1\" height=\"2.1\" fill=\"white\"/>\n\
             <g fill=\"none\" stroke=\"black\" stroke-width=\"0.002\" stroke-linejoin=\"round\">\n",
        );
        for figure in &self.figures {
            let mut d = String::new();
            for stroke in &figure.strokes {
                for (i, p) in stroke.points.iter().enumerate() {
                    let cmd = if i == 0 { 'M' } else { 'L' };
                    let _ = write!(d, "{cmd}{:.6} {:.6} ", p.x, -p.y);
                }
                if stroke.closed {
                    d.push_str("Z ");
                }
            }
            let _ = writeln!(svg, "<path d=\"{}\"/>", d.trim_end());
        }
        svg.push_str("</g>\n</svg>\n");
        svg
    }

    /// `{"depth": k, "polygons": [[[[x, y], ...], ...], ...]}`: figures, then
    /// strokes, then points. Closed strokes repeat their first point.
    pub fn to_json(&self) -> serde_json::Value {
        let polygons: Vec<Vec<Vec<[f64; 2]>>> = self
            .figures
            .iter()
            .map(|f| {
                f.strokes
                    .iter()
                    .map(|s| {
                        let mut pts: Vec<[f64; 2]> = s.points.iter().map(|p| [p.x, p.y]).collect();
                        if s.closed {
                            if let Some(&first) = pts.first() {
                                pts.push(first);
                            }
                        }
                        pts
                    })
                    .collect()
            })
            .collect();
        serde_json::json!({ "depth": self.depth, "polygons": polygons })
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The drawn `{n/m}` figure: `gcd(n, m)` interleaved cycles stepping `m`
/// vertices at a time, or for half-integer `m = n/2` the spokes from the
/// center to each vertex.
pub fn initial_polygon(spec: &FlakeSpec) -> Result<Figure> {
    let polygon = spec.polygon()?;
    let n = polygon.n();
    let strokes = match polygon.density().as_integer() {
        Some(m) => {
            let g = gcd(n, m);
            (0..g)
                .map(|start| {
                    let points: Vec<Point> = (0..n / g).map(|j| vertex(n, start + j * m)).collect();
                    let closed = points.len() > 2;
                    Polyline { points, closed }
                })
                .collect()
        }
        None => (0..n)
            .map(|k| Polyline {
                points: vec![Point::ORIGIN, vertex(n, k)],
                closed: false,
            })
            .collect(),
    };
    Ok(Figure { strokes })
}

/// All `N^depth` copies of the initial figure.
pub fn iterate(spec: &FlakeSpec, depth: u32) -> Result<PolygonSet> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthLimit {
            depth,
            limit: MAX_DEPTH,
        });
    }
    let system = build_flake(spec)?;
    let total = (system.len() as u64).checked_pow(depth).unwrap_or(u64::MAX);
    if total > MAX_FIGURES {
        return Err(Error::Render(format!(
            "depth {depth} would produce {total} figures (limit {MAX_FIGURES})"
        )));
    }
    let mut figures = vec![initial_polygon(spec)?];
    for _ in 0..depth {
        figures = step(&figures, &system);
    }
    Ok(PolygonSet { figures, depth })
}

fn step(figures: &[Figure], system: &IfsSystem) -> Vec<Figure> {
    figures
        .par_iter()
        .flat_map_iter(|f| system.maps().iter().map(move |m| f.mapped(m)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contact {
    Apart,
    /// Closer than the tolerance without a transversal interior crossing
    /// (shared vertices, T-junctions, collinear overlap).
    Touch,
    Cross,
}

fn signed_distance(a: Point, b: Point, p: Point) -> f64 {
    let dir = b - a;
    let len = dir.norm();
    if len == 0.0 {
        return p.distance(a);
    }
    dir.cross(p - a) / len
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let dir = b - a;
    let len2 = dir.dot(dir);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(dir) / len2).clamp(0.0, 1.0);
    p.distance(a + dir * t)
}

/// Classifies two segments with an orientation test widened by `tol`.
pub fn classify_segments(a0: Point, a1: Point, b0: Point, b1: Point, tol: f64) -> Contact {
    let s1 = signed_distance(a0, a1, b0);
    let s2 = signed_distance(a0, a1, b1);
    let s3 = signed_distance(b0, b1, a0);
    let s4 = signed_distance(b0, b1, a1);
    let strictly_opposite =
        |u: f64, v: f64| u.abs() > tol && v.abs() > tol && (u > 0.0) != (v > 0.0);
    if strictly_opposite(s1, s2) && strictly_opposite(s3, s4) {
        return Contact::Cross;
    }
    let gap = point_segment_distance(b0, a0, a1)
        .min(point_segment_distance(b1, a0, a1))
        .min(point_segment_distance(a0, b0, b1))
        .min(point_segment_distance(a1, b0, b1));
    let collinear = s1.abs() <= tol && s2.abs() <= tol;
    if gap <= tol || (!collinear && s1 * s2 <= 0.0 && s3 * s4 <= 0.0) {
        Contact::Touch
    } else {
        Contact::Apart
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OsculationReport {
    /// Some pair of depth-1 copies has edges crossing at an interior point.
    pub intersecting: bool,
    /// Copy pairs that meet (touch or cross).
    pub touching_pairs: usize,
    pub crossing_pairs: usize,
    /// Vertex copies meeting the center copy, when there is one.
    pub center_contacts: Option<usize>,
    /// Smallest distance between any two copies that do not meet.
    pub min_gap: Option<f64>,
}

fn pair_contact(a: &Figure, b: &Figure, tol: f64) -> (Contact, f64) {
    let (alo, ahi) = a.bounds();
    let (blo, bhi) = b.bounds();
    let dx = (blo.x - ahi.x).max(alo.x - bhi.x).max(0.0);
    let dy = (blo.y - ahi.y).max(alo.y - bhi.y).max(0.0);
    let box_gap = dx.hypot(dy);
    if box_gap > tol {
        return (Contact::Apart, box_gap);
    }
    let mut best = Contact::Apart;
    let mut gap = f64::INFINITY;
    let mut contacts: Vec<Point> = Vec::new();
    for (a0, a1) in a.segments() {
        for (b0, b1) in b.segments() {
            match classify_segments(a0, a1, b0, b1, tol) {
                Contact::Cross => return (Contact::Cross, 0.0),
                Contact::Touch => {
                    best = Contact::Touch;
                    gap = 0.0;
                    for (q, s0, s1) in [(b0, a0, a1), (b1, a0, a1), (a0, b0, b1), (a1, b0, b1)] {
                        if point_segment_distance(q, s0, s1) <= tol
                            && contacts.iter().all(|c| c.distance(q) > tol)
                        {
                            contacts.push(q);
                        }
                    }
                }
                Contact::Apart => {
                    if best == Contact::Apart {
                        let d = point_segment_distance(b0, a0, a1)
                            .min(point_segment_distance(b1, a0, a1))
                            .min(point_segment_distance(a0, b0, b1))
                            .min(point_segment_distance(a1, b0, b1));
                        gap = gap.min(d);
                    }
                }
            }
        }
    }
    if contacts.iter().any(|&c| passes_through(a, b, c, tol)) {
        return (Contact::Cross, 0.0);
    }
    (best, gap)
}

/// Directions of the edges of `fig` leaving `c`.
fn rays_at(fig: &Figure, c: Point, tol: f64) -> Vec<f64> {
    let mut rays = Vec::new();
    for (s0, s1) in fig.segments() {
        if point_segment_distance(c, s0, s1) > tol {
            continue;
        }
        for end in [s0, s1] {
            if end.distance(c) > tol {
                let d = end - c;
                rays.push(d.y.atan2(d.x));
            }
        }
    }
    rays
}

/// True when `b` passes from one side of `a` to the other at the contact
/// point `c`, i.e. the edge directions of the two figures interleave.
fn passes_through(a: &Figure, b: &Figure, c: Point, tol: f64) -> bool {
    const SAME_DIRECTION: f64 = 1e-9;
    let ra = rays_at(a, c, tol);
    let mut rb = rays_at(b, c, tol);
    let mut labelled: Vec<(f64, bool)> = Vec::new();
    for &t in &ra {
        let shared = rb.iter().position(|&u| {
            let d = (t - u).rem_euclid(std::f64::consts::TAU);
            d.min(std::f64::consts::TAU - d) < SAME_DIRECTION
        });
        match shared {
            Some(k) => {
                rb.swap_remove(k);
            }
            None => labelled.push((t, true)),
        }
    }
    labelled.extend(rb.into_iter().map(|u| (u, false)));
    labelled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let changes = (0..labelled.len())
        .filter(|&i| labelled[i].1 != labelled[(i + 1) % labelled.len()].1)
        .count();
    changes >= 4
}

/// Tests the depth-1 copies of `spec` pairwise for crossings and contacts.
pub fn osculation_check(spec: &FlakeSpec) -> Result<OsculationReport> {
    let copies = iterate(spec, 1)?.figures;
    let has_center = spec.center.is_some();
    let pairs: Vec<(usize, usize)> = (0..copies.len())
        .flat_map(|i| (i + 1..copies.len()).map(move |j| (i, j)))
        .collect();
    let results: Vec<((usize, usize), (Contact, f64))> = pairs
        .par_iter()
        .map(|&(i, j)| {
            (
                (i, j),
                pair_contact(&copies[i], &copies[j], TOUCH_TOLERANCE),
            )
        })
        .collect();

    let center = copies.len() - 1;
    let mut report = OsculationReport {
        intersecting: false,
        touching_pairs: 0,
        crossing_pairs: 0,
        center_contacts: has_center.then_some(0),
        min_gap: None,
    };
    for ((_, j), (contact, gap)) in results {
        match contact {
            Contact::Apart => {
                report.min_gap = Some(report.min_gap.map_or(gap, |g: f64| g.min(gap)));
            }
            Contact::Touch | Contact::Cross => {
                report.touching_pairs += 1;
                if contact == Contact::Cross {
                    report.crossing_pairs += 1;
                    report.intersecting = true;
                }
                if has_center && j == center {
                    *report.center_contacts.as_mut().expect("center present") += 1;
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{contraction_ratio, Density};
    use crate::ifs::preset;

    fn vertex_order(figure: &Figure, n: u32) -> Vec<u32> {
        figure.strokes[0]
            .points
            .iter()
            .map(|p| (0..n).find(|&k| vertex(n, k).distance(*p) < 1e-12).unwrap())
            .collect()
    }

    #[test]
    fn pentagram_traversal() {
        let fig = initial_polygon(&FlakeSpec::ngon(5, 2)).unwrap();
        assert_eq!(fig.strokes.len(), 1);
        assert!(fig.strokes[0].closed);
        assert_eq!(vertex_order(&fig, 5), vec![0, 2, 4, 1, 3]);
        assert_eq!(fig.segments().count(), 5);
    }

    #[test]
    fn compound_and_degenerate_figures() {
        let diam = initial_polygon(&FlakeSpec::ngon(6, 3)).unwrap();
        assert_eq!(diam.strokes.len(), 3);
        assert!(diam
            .strokes
            .iter()
            .all(|s| !s.closed && s.points.len() == 2));
        assert_eq!(diam.segments().count(), 3);

        let hexagram = initial_polygon(&FlakeSpec::ngon(6, 2)).unwrap();
        assert_eq!(hexagram.strokes.len(), 2);
        assert!(hexagram
            .strokes
            .iter()
            .all(|s| s.points.len() == 3 && s.closed));

        let spokes = FlakeSpec::ngon(7, 3).with_draw_density(Density::from_halves(7));
        let fig = initial_polygon(&spokes).unwrap();
        assert_eq!(fig.strokes.len(), 7);
        assert!(fig.strokes.iter().all(|s| s.points[0] == Point::ORIGIN));
    }

    #[test]
    fn counts_and_radii() {
        let spec = FlakeSpec::ngon(5, 2);
        assert_eq!(iterate(&spec, 0).unwrap().len(), 1);
        let set = iterate(&spec, 4).unwrap();
        assert_eq!(set.len(), 625);
        let r = contraction_ratio(5, 2).unwrap().powi(4);
        for f in &set.figures {
            let c = f.points().fold(Point::ORIGIN, |acc, p| acc + p) * (1.0 / 5.0);
            assert!((f.radius_about(c) - r).abs() < 1e-9);
        }
        assert_eq!(iterate(&preset("hexaflake").unwrap(), 2).unwrap().len(), 49);
    }

    #[test]
    fn depth_guard() {
        assert!(matches!(
            iterate(&FlakeSpec::ngon(3, 1), 9),
            Err(Error::DepthLimit { depth: 9, limit: 8 })
        ));
        assert!(iterate(&FlakeSpec::ngon(60, 15), 8).is_err());
    }

    #[test]
    fn segment_contacts() {
        let p = Point::new;
        let tol = 1e-9;
        assert_eq!(
            classify_segments(p(-1.0, 0.0), p(1.0, 0.0), p(0.0, -1.0), p(0.0, 1.0), tol),
            Contact::Cross
        );
        assert_eq!(
            classify_segments(p(-1.0, 0.0), p(1.0, 0.0), p(0.0, 0.0), p(0.0, 1.0), tol),
            Contact::Touch
        );
        assert_eq!(
            classify_segments(p(-1.0, 0.0), p(0.0, 0.0), p(0.0, 0.0), p(1.0, 1.0), tol),
            Contact::Touch
        );
        assert_eq!(
            classify_segments(p(-1.0, 0.0), p(1.0, 0.0), p(0.0, 0.0), p(2.0, 0.0), tol),
            Contact::Touch
        );
        assert_eq!(
            classify_segments(p(-1.0, 0.0), p(1.0, 0.0), p(0.0, 0.1), p(0.0, 1.0), tol),
            Contact::Apart
        );
        assert_eq!(
            classify_segments(p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(3.0, 0.0), tol),
            Contact::Apart
        );
    }

    #[test]
    fn theorem_examples() {
        assert!(
            osculation_check(&FlakeSpec::ngon(9, 2))
                .unwrap()
                .intersecting
        );
        let ok = osculation_check(&FlakeSpec::ngon(9, 3)).unwrap();
        assert!(!ok.intersecting);
        assert!(ok.touching_pairs >= 9);
        let eight = osculation_check(&FlakeSpec::ngon(8, 2)).unwrap();
        assert!(!eight.intersecting);
        assert!(eight.touching_pairs >= 8);
        // convex copies at ratio 1/2 overlap and share vertices without edge crossings
        let convex = osculation_check(&FlakeSpec::ngon(8, 1)).unwrap();
        assert!(convex.intersecting);
    }

    #[test]
    fn vertex_contacts() {
        let p = Point::new;
        let fig = |pts: Vec<Point>| Figure {
            strokes: vec![Polyline {
                points: pts,
                closed: false,
            }],
        };
        let vee = fig(vec![p(-1.0, 1.0), p(0.0, 0.0), p(1.0, 1.0)]);
        let hat = fig(vec![p(-1.0, -1.0), p(0.0, 0.0), p(1.0, -1.0)]);
        let slash = fig(vec![p(-1.0, -1.0), p(0.0, 0.0), p(1.0, 1.0)]);
        assert!(!passes_through(&vee, &hat, Point::ORIGIN, 1e-9));
        assert!(passes_through(
            &vee,
            &fig(vec![p(0.0, 1.0), p(0.0, 0.0), p(0.0, -1.0)]),
            Point::ORIGIN,
            1e-9
        ));
        // one shared ray leaves no side to cross to
        assert!(!passes_through(&vee, &slash, Point::ORIGIN, 1e-9));
    }

    #[test]
    fn exports() {
        let set = iterate(&FlakeSpec::ngon(3, 1), 1).unwrap();
        let svg = set.to_svg();
        assert_eq!(svg.matches("<path").count(), 3);
        let json = set.to_json();
        assert_eq!(json["depth"], 1);
        let polys = json["polygons"].as_array().unwrap();
        assert_eq!(polys.len(), 3);
        // closed triangle: 3 vertices + repeated first
        assert_eq!(polys[0][0].as_array().unwrap().len(), 4);
    }
}
