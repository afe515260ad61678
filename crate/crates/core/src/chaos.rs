//! Random-walk ("chaos game") sampling of an attractor.
//!
//! The walk starts at the origin, draws a map with the system's selection
//! probabilities at every step and keeps the orbit after a fixed burn-in.
//! The generator is xoshiro256++ seeded through SplitMix64, so a
//! `(system, count, seed)` triple gives the same cloud on every platform.

use std::io::{BufRead, Read, Write};

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::ifs::{Affine, IfsSystem};
use crate::numfmt;

/// Iterations discarded before points are recorded.
pub const BURN_IN: usize = 20;

/// Significant digits written per coordinate in CSV.
pub const CSV_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<Point>,
    /// One seed per independent orbit, in merge order.
    pub seeds: Vec<u64>,
    /// Hex SHA-256 of the generating system, empty for clouds read from disk.
    pub system_hash: String,
}

/// Digest of the maps and selection probabilities.
pub fn system_hash(system: &IfsSystem) -> String {
    let mut hasher = Sha256::new();
    for map in system.maps() {
        for v in [
            map.scale,
            map.rotation,
            map.fixed_point.x,
            map.fixed_point.y,
        ] {
            hasher.update(v.to_le_bytes());
        }
    }
    for p in system.probabilities() {
        hasher.update(p.to_le_bytes());
    }
    hasher.update([u8::from(system.has_center())]);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Uniform draw in the open interval (0, 1).
fn open_unit(rng: &mut Xoshiro256PlusPlus) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn orbit(maps: &[Affine], starts: &[f64], count: usize, seed: u64) -> Vec<Point> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut x = Point::ORIGIN;
    let mut out = Vec::with_capacity(count);
    for step in 0..count + BURN_IN {
        let r = open_unit(&mut rng);
        // number of cumulative starts below r, minus one
        let i = starts.partition_point(|&s| s < r) - 1;
        x = maps[i].apply(x);
        if step >= BURN_IN {
            out.push(x);
        }
    }
    out
}

fn prepare(system: &IfsSystem) -> (Vec<Affine>, Vec<f64>) {
    let maps = system.maps().iter().map(|m| m.affine()).collect();
    (maps, system.cumulative_starts())
}

/// `count` points of one orbit.
pub fn generate(system: &IfsSystem, count: usize, seed: u64) -> PointCloud {
    let (maps, starts) = prepare(system);
    PointCloud {
        points: orbit(&maps, &starts, count, seed),
        seeds: vec![seed],
        system_hash: system_hash(system),
    }
}

/// `count` points split evenly over independent orbits, concatenated in seed order.
pub fn orbit_parallel(system: &IfsSystem, count: usize, seeds: &[u64]) -> Result<PointCloud> {
    if seeds.is_empty() || !count.is_multiple_of(seeds.len()) {
        return Err(Error::UnevenSplit {
            points: count,
            seeds: seeds.len(),
        });
    }
    let per_orbit = count / seeds.len();
    let (maps, starts) = prepare(system);
    let parts: Vec<Vec<Point>> = seeds
        .par_iter()
        .map(|&seed| orbit(&maps, &starts, per_orbit, seed))
        .collect();
    Ok(PointCloud {
        points: parts.concat(),
        seeds: seeds.to_vec(),
        system_hash: system_hash(system),
    })
}

impl PointCloud {
    pub fn from_points(points: Vec<Point>) -> Self {
        PointCloud {
            points,
            seeds: Vec::new(),
            system_hash: String::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `x,y` per line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for p in &self.points {
            writeln!(
                out,
                "{},{}",
                numfmt::significant(p.x, CSV_DIGITS),
                numfmt::significant(p.y, CSV_DIGITS)
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut points = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))
            };
            let (x, y) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected 'x,y'", i + 1)))?;
            points.push(Point::new(parse(x)?, parse(y)?));
        }
        Ok(PointCloud::from_points(points))
    }

    /// Little-endian `u64` point count followed by `f64` x/y pairs.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(&(self.points.len() as u64).to_le_bytes())?;
        for p in &self.points {
            out.write_all(&p.x.to_le_bytes())?;
            out.write_all(&p.y.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut input: R) -> Result<Self> {
        let mut word = [0u8; 8];
        input.read_exact(&mut word)?;
        let count = u64::from_le_bytes(word);
        let mut points = Vec::with_capacity(count.min(1 << 24) as usize);
        for _ in 0..count {
            input.read_exact(&mut word)?;
            let x = f64::from_le_bytes(word);
            input.read_exact(&mut word)?;
            let y = f64::from_le_bytes(word);
            points.push(Point::new(x, y));
        }
        Ok(PointCloud::from_points(points))
    }
}
