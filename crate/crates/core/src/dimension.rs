//! Hausdorff dimension of the constructed attractors.
//!
//! With the open set condition in place the dimension is the root `s` of the
//! Moran equation `Σ c_i^s = 1`. Box counting over a chaos-game cloud gives an
//! independent (and much noisier) estimate.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{canonical_m, contraction_ratio_real, Point};
use crate::ifs::{build_flake, FlakeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DimensionMethod {
    ClosedForm,
    Bisection,
    BoxCount,
}

impl std::fmt::Display for DimensionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DimensionMethod::ClosedForm => "closed-form",
            DimensionMethod::Bisection => "bisection",
            DimensionMethod::BoxCount => "box-count",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionResult {
    pub value: f64,
    pub method: DimensionMethod,
    /// `|Σ c_i^s - 1|` for Moran roots, RMS fit residual for box counting.
    pub residual: f64,
}

const BISECTION_ITERATIONS: usize = 200;
const INITIAL_UPPER: f64 = 64.0;

fn moran_residual(ratios: &[f64], s: f64) -> f64 {
    ratios.iter().map(|c| c.powf(s)).sum::<f64>() - 1.0
}

/// Root of `Σ c_i^s = 1`.
///
/// Equal ratios use `-ln N / ln c`; otherwise the left side is strictly
/// decreasing in `s` and the root is bisected on `[0, 64]` (the bracket is
/// widened if the ratios are so close to 1 that it does not contain the root).
pub fn moran_solve(ratios: &[f64]) -> Result<DimensionResult> {
    let first = *ratios.first().ok_or(Error::EmptyRatios)?;
    if let Some(&bad) = ratios.iter().find(|&&c| !(c > 0.0 && c < 1.0)) {
        return Err(Error::NonContractive(bad));
    }
    if ratios.iter().all(|&c| c == first) {
        let value = -(ratios.len() as f64).ln() / first.ln();
        return Ok(DimensionResult {
            value,
            method: DimensionMethod::ClosedForm,
            residual: moran_residual(ratios, value).abs(),
        });
    }
    let value = bisect_moran(ratios);
    Ok(DimensionResult {
        value,
        method: DimensionMethod::Bisection,
        residual: moran_residual(ratios, value).abs(),
    })
}

fn bisect_moran(ratios: &[f64]) -> f64 {
    let mut lo = 0.0;
    let mut hi = INITIAL_UPPER;
    while moran_residual(ratios, hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if moran_residual(ratios, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick whichever end sits closer to the root
    if moran_residual(ratios, lo).abs() <= moran_residual(ratios, hi).abs() {
        lo
    } else {
        hi
    }
}

/// `-ln n / ln P(n, m)` for the vertex-only system.
pub fn ngon_dimension(n: u32, m: u32) -> Result<DimensionResult> {
    let p = crate::geometry::contraction_ratio(n, m)?;
    closed_form(f64::from(n), p)
}

fn closed_form(n: f64, p: f64) -> Result<DimensionResult> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::NonContractive(p));
    }
    let value = -n.ln() / p.ln();
    // log space keeps n = 1e308 away from subnormal P^s
    let residual = (n.ln() + value * p.ln()).exp_m1().abs();
    Ok(DimensionResult {
        value,
        method: DimensionMethod::ClosedForm,
        residual,
    })
}

/// Moran root over all maps of the system described by `spec`.
pub fn flake_dimension(spec: &FlakeSpec) -> Result<DimensionResult> {
    moran_solve(&build_flake(spec)?.scales())
}

/// Smallest cloud accepted by [`box_count_estimate`].
pub const MIN_BOX_COUNT_POINTS: usize = 100_000;

/// Grid levels (2^level cells per side of `[-1, 1]^2`) used when the caller
/// has no preference.
pub const DEFAULT_BOX_LEVELS: [u32; 6] = [4, 5, 6, 7, 8, 9];

/// Box-counting dimension: least-squares slope of `ln N(ε)` against `ln(1/ε)`
/// on dyadic grids anchored at `(-1, -1)` with side 2.
pub fn box_count_estimate(points: &[Point], levels: &[u32]) -> Result<DimensionResult> {
    if points.len() < MIN_BOX_COUNT_POINTS {
        return Err(Error::BoxCount(format!(
            "need at least {MIN_BOX_COUNT_POINTS} points, got {}",
            points.len()
        )));
    }
    if levels.len() < 4 {
        return Err(Error::BoxCount(format!(
            "need at least 4 grid levels, got {}",
            levels.len()
        )));
    }
    let lo = *levels.iter().min().expect("non-empty");
    let hi = *levels.iter().max().expect("non-empty");
    if hi - lo < 2 {
        return Err(Error::BoxCount(
            "grid levels must span at least 2 octaves".into(),
        ));
    }
    if hi > 30 {
        return Err(Error::BoxCount(format!("grid level {hi} is too fine")));
    }
    let first = points[0];
    if points.iter().all(|&p| p == first) {
        return Err(Error::BoxCount("all points are identical".into()));
    }

    let samples: Vec<(f64, f64)> = levels
        .iter()
        .map(|&level| {
            let count = occupied_boxes(points, level);
            let cells = f64::from(1u32 << level);
            // box side is 2 / cells
            ((cells / 2.0).ln(), (count as f64).ln())
        })
        .collect();
    let (slope, rms) = least_squares(&samples);
    Ok(DimensionResult {
        value: slope,
        method: DimensionMethod::BoxCount,
        residual: rms,
    })
}

/// Number of occupied cells on a `2^level` by `2^level` grid over `[-1, 1]^2`.
pub fn occupied_boxes(points: &[Point], level: u32) -> usize {
    let cells = 1u64 << level;
    let to_cell = |v: f64| -> u64 {
        let t = ((v + 1.0) * 0.5 * cells as f64).floor();
        t.clamp(0.0, (cells - 1) as f64) as u64
    };
    points
        .iter()
        .map(|p| (to_cell(p.x) << 32) | to_cell(p.y))
        .collect::<HashSet<u64>>()
        .len()
}

fn least_squares(samples: &[(f64, f64)]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = samples.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = samples
        .iter()
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    (slope, (sse / n).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AsymptoteKind {
    /// Vertex-only n-gons, dimension tends to 1.
    NGonToOne,
    /// Standard n-flakes, dimension tends to 2.
    FlakeToTwo,
}

/// Dimension at each `n`, in order.
///
/// `NGonToOne` accepts real `n` up to `f64::MAX`; beyond `2^32` the density is
/// taken as `n/4`. `FlakeToTwo` needs integer `n` and uses the standard flake
/// (`[L^0, 0]` even, `[L^1, γ]` odd).
pub fn asymptote_check(kind: AsymptoteKind, n_values: &[f64]) -> Result<Vec<(f64, f64)>> {
    n_values
        .iter()
        .map(|&n| {
            let dim = match kind {
                AsymptoteKind::NGonToOne => ngon_dimension_real(n)?,
                AsymptoteKind::FlakeToTwo => {
                    flake_dimension(&FlakeSpec::standard_flake(as_count(n)?)?)?
                }
            };
            Ok((n, dim.value))
        })
        .collect()
}

fn as_count(n: f64) -> Result<u32> {
    if n.fract() != 0.0 || !(2.0..=f64::from(u32::MAX)).contains(&n) {
        return Err(Error::Parse(format!("n = {n} is not a vertex count")));
    }
    Ok(n as u32)
}

/// Dimension of the non-crossing n-gon for real `n`.
pub fn ngon_dimension_real(n: f64) -> Result<DimensionResult> {
    if n < 2.0 || !n.is_finite() {
        return Err(Error::Parse(format!("n = {n} is out of range")));
    }
    let m = if n <= f64::from(u32::MAX) && n.fract() == 0.0 {
        f64::from(canonical_m(n as u32)?.m())
    } else {
        n / 4.0
    };
    closed_form(n, contraction_ratio_real(n, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::contraction_ratio;

    #[test]
    fn closed_form_examples() {
        let nine = vec![contraction_ratio(9, 3).unwrap(); 9];
        let d = moran_solve(&nine).unwrap();
        assert_eq!(d.method, DimensionMethod::ClosedForm);
        assert!((d.value - 1.620_758_533_559_782_5).abs() < 1e-13);
        assert_eq!(moran_solve(&[0.5; 4]).unwrap().value, 2.0);
        assert_eq!(moran_solve(&[0.3]).unwrap().value, 0.0);
    }

    #[test]
    fn quadratic_flake() {
        // 6 y^2 + y - 1 = 0 with y = (1/3)^(s/2)
        let mut r = vec![1.0 / 3.0; 6];
        r.push((1.0f64 / 3.0).sqrt());
        let d = moran_solve(&r).unwrap();
        assert_eq!(d.method, DimensionMethod::Bisection);
        assert!((d.value - 2.0).abs() < 1e-12);
        assert!(d.residual <= 1e-12);
    }

    #[test]
    fn rejects_bad_ratios() {
        assert!(matches!(moran_solve(&[]), Err(Error::EmptyRatios)));
        assert!(matches!(
            moran_solve(&[0.5, 1.0]),
            Err(Error::NonContractive(_))
        ));
        assert!(matches!(
            moran_solve(&[0.5, 0.0]),
            Err(Error::NonContractive(_))
        ));
    }

    #[test]
    fn bracket_widens_for_ratios_near_one() {
        let d = moran_solve(&[0.999, 0.9995]).unwrap();
        assert!(d.value > 64.0);
        assert!(d.residual < 1e-12);
    }

    #[test]
    fn ngon_examples() {
        assert!((ngon_dimension(3, 1).unwrap().value - 1.584_962_500_721_156_3).abs() < 1e-14);
        assert!((ngon_dimension(24, 7).unwrap().value - 1.477_293_056_255_685_2).abs() < 1e-13);
        assert_eq!(
            format!("{:.4}", ngon_dimension(17, 5).unwrap().value),
            "1.5238"
        );
    }

    #[test]
    fn huge_n() {
        let d = ngon_dimension_real(1e308).unwrap();
        assert!((d.value - 1.001_622).abs() < 1e-5);
    }

    #[test]
    fn box_count_preconditions() {
        let few = vec![Point::new(0.1, 0.2); 10];
        assert!(box_count_estimate(&few, &DEFAULT_BOX_LEVELS).is_err());
        let same = vec![Point::new(0.1, 0.2); MIN_BOX_COUNT_POINTS];
        assert!(box_count_estimate(&same, &DEFAULT_BOX_LEVELS).is_err());
        let line: Vec<Point> = (0..MIN_BOX_COUNT_POINTS)
            .map(|i| Point::new(i as f64 / MIN_BOX_COUNT_POINTS as f64, 0.0))
            .collect();
        assert!(box_count_estimate(&line, &[3, 4, 5]).is_err());
        assert!(box_count_estimate(&line, &[3, 4, 4, 4]).is_err());
    }

    #[test]
    fn segment_is_one_dimensional() {
        let pts: Vec<Point> = (0..200_000)
            .map(|i| {
                let t = i as f64 / 200_000.0;
                Point::new(-0.9 + 1.7 * t, -0.3 + 0.9 * t)
            })
            .collect();
        let d = box_count_estimate(&pts, &DEFAULT_BOX_LEVELS).unwrap();
        assert_eq!(d.method, DimensionMethod::BoxCount);
        assert!((d.value - 1.0).abs() < 0.05, "{}", d.value);
    }

    #[test]
    fn disk_is_two_dimensional() {
        use rand_core::{RngCore, SeedableRng};
        let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(7);
        let mut unit = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        let mut pts = Vec::with_capacity(1_000_000);
        while pts.len() < 1_000_000 {
            let p = Point::new(2.0 * unit() - 1.0, 2.0 * unit() - 1.0);
            if p.norm() <= 1.0 {
                pts.push(p);
            }
        }
        let d = box_count_estimate(&pts, &DEFAULT_BOX_LEVELS).unwrap();
        assert!((d.value - 2.0).abs() < 0.1, "{}", d.value);
    }

    #[test]
    fn asymptotes_trend() {
        let ngon =
            asymptote_check(AsymptoteKind::NGonToOne, &[10.0, 100.0, 1000.0, 10000.0]).unwrap();
        assert!(ngon.windows(2).all(|w| w[1].1 < w[0].1));
        assert!(ngon.iter().all(|&(_, d)| d > 1.0));
        let flake =
            asymptote_check(AsymptoteKind::FlakeToTwo, &[6.0, 10.0, 20.0, 50.0, 100.0]).unwrap();
        assert!(flake.windows(2).all(|w| w[1].1 > w[0].1));
        assert!(flake.last().unwrap().1 > 1.9);
        // canonical m alternates with n mod 4, so neighbouring even n need not increase
        let pair = asymptote_check(AsymptoteKind::FlakeToTwo, &[8.0, 10.0]).unwrap();
        assert!(pair[1].1 < pair[0].1);
        assert!(asymptote_check(AsymptoteKind::FlakeToTwo, &[6.5]).is_err());
    }
}
