#![allow(dead_code)]

use std::path::PathBuf;

use polyflake::geometry::{vertex, Point};

pub fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Rounds `value` to as many decimals as `printed` shows.
fn at_printed_precision(value: f64, printed: &str) -> String {
    let decimals = printed.split_once('.').map_or(0, |(_, frac)| frac.len());
    let s = format!("{value:.decimals$}");
    let trimmed = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        &s
    };
    if trimmed == "-0" {
        "0".to_owned()
    } else {
        trimmed.to_owned()
    }
}

/// Compares a whitespace-separated table with a golden one, each of our
/// values rounded to the precision of the corresponding golden token.
pub fn table_matches(ours: &str, golden: &str) -> Result<(), String> {
    let a: Vec<Vec<&str>> = ours
        .lines()
        .map(|l| l.split_whitespace().collect())
        .collect();
    let b: Vec<Vec<&str>> = golden
        .lines()
        .map(|l| l.split_whitespace().collect())
        .collect();
    if a.len() != b.len() {
        return Err(format!("{} rows, expected {}", a.len(), b.len()));
    }
    for (i, (ra, rb)) in a.iter().zip(&b).enumerate() {
        if ra.len() != rb.len() {
            return Err(format!(
                "row {}: {} columns, expected {}",
                i + 1,
                ra.len(),
                rb.len()
            ));
        }
        for (ta, tb) in ra.iter().zip(rb) {
            let v: f64 = ta
                .parse()
                .map_err(|e| format!("row {}: {ta}: {e}", i + 1))?;
            let rounded = at_printed_precision(v, tb);
            if rounded != *tb {
                return Err(format!(
                    "row {}: {ta} rounds to {rounded}, expected {tb}",
                    i + 1
                ));
            }
        }
    }
    Ok(())
}

fn line_parameter(a0: Point, a1: Point, b0: Point, b1: Point) -> f64 {
    let r = a1 - a0;
    let s = b1 - b0;
    (b0 - a0).cross(s) / r.cross(s)
}

/// Contraction ratio found by construction: the fraction of the star edge
/// `A_0 A_m` cut off by the neighbouring edge `A_1 A_{1-m}`. For `m = 1`
/// both edges are the same side and the copies meet at its midpoint.
pub fn secant_ratio(n: u32, m: u32) -> f64 {
    if m == 1 {
        let (a, b) = (vertex(n, 0), vertex(n, 1));
        let mid = (a + b) * 0.5;
        return a.distance(mid) / a.distance(b);
    }
    line_parameter(
        vertex(n, 0),
        vertex(n, m),
        vertex(n, 1),
        vertex(n, (n + 1 - m) % n),
    )
}
