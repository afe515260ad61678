//! Sierpinski n-gons and n-flakes.
//!
//! Iterated function systems whose maps contract toward the vertices of a
//! regular star polygon (and optionally toward its center), with:
//!
//! * [`geometry`]: closed-form ratios and angles on the unit circle,
//! * [`ifs`]: system assembly, presets and the coefficient-table format,
//! * [`dimension`]: Moran-equation and box-counting dimensions,
//! * [`chaos`]: seeded chaos-game point clouds,
//! * [`exact`]: deterministic polygon iteration and crossing checks,
//! * [`render`]: rasterization to images.

pub mod chaos;
pub mod dimension;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod ifs;
pub mod numfmt;
pub mod render;

pub use chaos::{generate, orbit_parallel, PointCloud};
pub use dimension::{
    asymptote_check, box_count_estimate, flake_dimension, moran_solve, ngon_dimension,
    AsymptoteKind, DimensionMethod, DimensionResult,
};
pub use error::{Error, Result};
pub use exact::{initial_polygon, iterate, osculation_check, OsculationReport, PolygonSet};
pub use geometry::{
    canonical_m, center_ratio_l, center_ratio_m, contraction_ratio, gamma, vertices, CenterFamily,
    CenterMapSpec, CenterRotation, Density, Point, StarPolygon,
};
pub use ifs::{
    build_flake, build_ngon, preset, CoefficientTable, FlakeSpec, IfsSystem, Similarity,
};
pub use render::{rasterize, render_polygons, OutputFormat, RenderConfig};
