use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyflake::geometry::{self, CenterFamily, CenterRotation, Density};

#[derive(Debug, Parser)]
#[command(name = "polyflake", version, about = "Sierpinski n-gons and n-flakes")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the attractor with the chaos game.
    Gen(GenArgs),
    /// Iterate the initial polygon exactly.
    Iter(IterArgs),
    /// Hausdorff dimension of the attractor.
    Dim(DimArgs),
    /// Check depth-1 copies for crossings and contacts.
    Check(CheckArgs),
    /// List the named fractals, or run an action on one.
    Preset(PresetArgs),
    /// Dimension table over a range of n.
    Sweep(SweepArgs),
}

/// `none`, `L:<l>` or `M:<l>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CenterArg {
    None,
    Map(CenterFamily, u32),
}

pub fn parse_center(s: &str) -> Result<CenterArg, String> {
    match geometry::parse_center(s).map_err(|e| e.to_string())? {
        None => Ok(CenterArg::None),
        Some((family, l)) => Ok(CenterArg::Map(family, l)),
    }
}

pub fn parse_rotation(s: &str) -> Result<CenterRotation, String> {
    s.parse().map_err(|e: polyflake::Error| e.to_string())
}

pub fn parse_density(s: &str) -> Result<Density, String> {
    s.parse::<Density>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Default, Args)]
pub struct SystemArgs {
    /// Number of vertices.
    #[arg(long)]
    pub n: Option<u32>,

    /// Star density: an integer, or n/2 for odd n (e.g. 4.5) to draw spokes.
    #[arg(long, value_parser = parse_density)]
    pub m: Option<Density>,

    /// Density used for the contraction ratio when --m is a half-integer.
    #[arg(long)]
    pub ratio_m: Option<u32>,

    /// Explicit vertex-map ratio instead of P(n, m).
    #[arg(long)]
    pub ratio: Option<f64>,

    /// Center map: none, L:<l> or M:<l>.
    #[arg(long, value_parser = parse_center)]
    pub center: Option<CenterArg>,

    /// Center rotation: none, half, gamma or radians.
    #[arg(long, value_parser = parse_rotation)]
    pub rot: Option<CenterRotation>,

    /// Start from a named fractal (see `polyflake preset`).
    #[arg(long)]
    pub preset: Option<String>,

    /// Pick maps uniformly instead of by area.
    #[arg(long)]
    pub uniform: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenFormat {
    Png,
    Csv,
    Binary,
    Json,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IterFormat {
    Svg,
    Json,
    Png,
}

#[derive(Debug, Clone, Args)]
pub struct ImageArgs {
    #[arg(long, default_value_t = 1000)]
    pub width: u32,
    #[arg(long, default_value_t = 1000)]
    pub height: u32,
    /// Border around the unit disk, as a fraction of its radius.
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
    /// Dot size in pixels.
    #[arg(long, default_value_t = 1)]
    pub point_size: u32,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 100_000)]
    pub points: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Independent orbits (seeds seed, seed+1, ...), run in parallel.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub orbits: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to the --out extension, else csv.
    #[arg(long, value_enum)]
    pub format: Option<GenFormat>,
    #[command(flatten)]
    pub image: ImageArgs,
}

#[derive(Debug, Clone, Args)]
pub struct IterArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(0..=8))]
    pub depth: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to the --out extension, else svg.
    #[arg(long, value_enum)]
    pub format: Option<IterFormat>,
    #[command(flatten)]
    pub image: ImageArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DimArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Also estimate the dimension by box counting a chaos-game cloud.
    #[arg(long)]
    pub box_count: bool,
    #[arg(long, default_value_t = 1_000_000)]
    pub points: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PresetArgs {
    /// Preset name; lists all presets when omitted.
    pub name: Option<String>,
    #[command(subcommand)]
    pub action: Option<PresetAction>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum PresetAction {
    Gen(GenArgs),
    Iter(IterArgs),
    Dim(DimArgs),
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    /// Non-crossing n-gons at m = ceil(n/4).
    Ngon,
    /// Standard flakes: [L0, 0] for even n, [L1, gamma] for odd n.
    Flake,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SweepKind::Ngon)]
    pub kind: SweepKind,
    #[arg(long, default_value_t = 17)]
    pub from: u32,
    #[arg(long, default_value_t = 50)]
    pub to: u32,
    /// Explicit n values instead of a range; real values allowed for ngon (e.g. 1e308).
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
    /// Also list the second density when 4 divides n.
    #[arg(long)]
    pub all_m: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn center_and_rotation() {
        assert_eq!(
            parse_center("L:1").unwrap(),
            CenterArg::Map(CenterFamily::L, 1)
        );
        assert_eq!(parse_center("none").unwrap(), CenterArg::None);
        assert!(parse_center("Q:1").is_err());
        assert!(parse_center("L").is_err());
        assert_eq!(parse_rotation("gamma").unwrap(), CenterRotation::Gamma);
        assert_eq!(parse_rotation("0.5").unwrap(), CenterRotation::Radians(0.5));
        assert!(parse_rotation("nan").is_err());
    }
}
