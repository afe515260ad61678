//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes the system as `(preset, n, m, center, rot)`; a
//! non-empty `preset` wins over the other four.

use polyflake::exact::{iterate, osculation_check};
use polyflake::geometry::{canonical_m, parse_center, CenterMapSpec, CenterRotation, Density};
use polyflake::ifs::{build_flake, preset, FlakeSpec, PRESET_NAMES};
use polyflake::render::{rasterize, render_polygons, RenderConfig};
use polyflake::{flake_dimension, generate};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Upper bound on chaos-game points per call.
pub const MAX_POINTS: u32 = 5_000_000;
/// Upper bound on exact-iteration figures per call.
pub const MAX_POLYGONS: usize = 500_000;

pub fn resolve_spec(
    preset_name: &str,
    n: u32,
    m: &str,
    center: &str,
    rot: &str,
) -> Result<FlakeSpec, String> {
    if !preset_name.is_empty() {
        return preset(preset_name).map_err(|e| e.to_string());
    }
    let canonical = canonical_m(n).map_err(|e| e.to_string())?.m();
    let mut spec = match m.trim() {
        "" => FlakeSpec::ngon(n, canonical),
        text => {
            let density: Density = text.parse().map_err(|e: polyflake::Error| e.to_string())?;
            match density.as_integer() {
                Some(m) => FlakeSpec::ngon(n, m),
                None => FlakeSpec::ngon(n, canonical).with_draw_density(density),
            }
        }
    };
    let center = if center.trim().is_empty() {
        "none"
    } else {
        center
    };
    if let Some((family, l)) = parse_center(center).map_err(|e| e.to_string())? {
        let rotation = match rot.trim() {
            "" => CenterRotation::None,
            text => text.parse().map_err(|e: polyflake::Error| e.to_string())?,
        };
        spec = spec.with_center(CenterMapSpec::new(family, l, rotation));
    }
    spec.polygon().map_err(|e| e.to_string())?;
    build_flake(&spec).map_err(|e| e.to_string())?;
    Ok(spec)
}

fn rgba(img: polyflake::render::RgbImage) -> Vec<u8> {
    img.pixels()
        .flat_map(|p| [p.0[0], p.0[1], p.0[2], 255])
        .collect()
}

pub fn chaos_image(spec: &FlakeSpec, points: u32, seed: u64, size: u32) -> Result<Vec<u8>, String> {
    if points == 0 || points > MAX_POINTS {
        return Err(format!("points must be in 1..={MAX_POINTS}"));
    }
    let system = build_flake(spec).map_err(|e| e.to_string())?;
    let cloud = generate(&system, points as usize, seed);
    let img = rasterize(&cloud, &RenderConfig::square(size)).map_err(|e| e.to_string())?;
    Ok(rgba(img))
}

pub fn exact_image(spec: &FlakeSpec, depth: u32, size: u32) -> Result<Vec<u8>, String> {
    let maps = build_flake(spec).map_err(|e| e.to_string())?.len();
    let count = (maps as f64).powi(depth as i32);
    if count > MAX_POLYGONS as f64 {
        return Err(format!(
            "{maps}^{depth} polygons is too many for the browser; lower the depth"
        ));
    }
    let set = iterate(spec, depth).map_err(|e| e.to_string())?;
    let img = render_polygons(&set, &RenderConfig::square(size)).map_err(|e| e.to_string())?;
    Ok(rgba(img))
}

/// Dimension, ratios and crossing report as a JSON string.
pub fn describe_spec(spec: &FlakeSpec) -> Result<String, String> {
    let err = |e: polyflake::Error| e.to_string();
    let system = build_flake(spec).map_err(err)?;
    let dim = flake_dimension(spec).map_err(err)?;
    let report = osculation_check(spec).map_err(err)?;
    Ok(json!({
        "spec": spec.to_string(),
        "maps": system.len(),
        "ratio": spec.ratio().map_err(err)?,
        "center_scale": spec.center_scale().map_err(err)?,
        "center_rotation": spec.center_rotation().map_err(err)?,
        "dimension": dim.value,
        "method": dim.method.to_string(),
        "intersecting": report.intersecting,
        "touching_pairs": report.touching_pairs,
        "center_contacts": report.center_contacts,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn presets() -> String {
    json!(PRESET_NAMES).to_string()
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn chaos_rgba(
    preset: &str,
    n: u32,
    m: &str,
    center: &str,
    rot: &str,
    points: u32,
    seed: u32,
    size: u32,
) -> Result<Vec<u8>, JsError> {
    let spec = resolve_spec(preset, n, m, center, rot).map_err(|e| JsError::new(&e))?;
    chaos_image(&spec, points, u64::from(seed), size).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn exact_rgba(
    preset: &str,
    n: u32,
    m: &str,
    center: &str,
    rot: &str,
    depth: u32,
    size: u32,
) -> Result<Vec<u8>, JsError> {
    let spec = resolve_spec(preset, n, m, center, rot).map_err(|e| JsError::new(&e))?;
    exact_image(&spec, depth, size).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn describe(preset: &str, n: u32, m: &str, center: &str, rot: &str) -> Result<String, JsError> {
    let spec = resolve_spec(preset, n, m, center, rot).map_err(|e| JsError::new(&e))?;
    describe_spec(&spec).map_err(|e| JsError::new(&e))
}
