//! Rasterization of point clouds and polygon sets.

use std::io::Cursor;

pub use image::RgbImage;
use image::{ImageFormat, Rgb};
use serde::{Deserialize, Serialize};

use crate::chaos::PointCloud;
use crate::error::{Error, Result};
use crate::exact::PolygonSet;
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Png,
    Svg,
    Csv,
    Json,
    Matrix,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderConfig {
    pub width: u32,
    pub height: u32,
    /// Extra space around the unit disk, as a fraction of its radius.
    pub margin: f64,
    /// Side of the square drawn per point, in pixels.
    pub point_size: u32,
    pub background: [u8; 3],
    pub foreground: [u8; 3],
    pub format: OutputFormat,
}

impl Default for RenderConfig {
    fn default() -> Self {
        RenderConfig {
            width: 1000,
            height: 1000,
            margin: 0.05,
            point_size: 1,
            background: [255, 255, 255],
            foreground: [0, 0, 0],
            format: OutputFormat::Png,
        }
    }
}

pub const MIN_SIDE: u32 = 16;

impl RenderConfig {
    pub fn square(side: u32) -> Self {
        RenderConfig {
            width: side,
            height: side,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < MIN_SIDE || self.height < MIN_SIDE {
            return Err(Error::Render(format!(
                "image must be at least {MIN_SIDE}x{MIN_SIDE}, got {}x{}",
                self.width, self.height
            )));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(Error::Render(format!(
                "margin {} must be non-negative",
                self.margin
            )));
        }
        if self.point_size == 0 {
            return Err(Error::Render("point size must be at least 1".into()));
        }
        Ok(())
    }

    /// Equal-aspect map of `[-1-margin, 1+margin]^2` onto the pixel grid,
    /// in continuous pixel coordinates.
    pub fn to_pixel(&self, p: Point) -> (f64, f64) {
        let half = 1.0 + self.margin;
        let scale = f64::from(self.width.min(self.height)) / (2.0 * half);
        (
            f64::from(self.width) / 2.0 + p.x * scale,
            f64::from(self.height) / 2.0 - p.y * scale,
        )
    }

    fn blank(&self) -> RgbImage {
        RgbImage::from_pixel(self.width, self.height, Rgb(self.background))
    }
}

fn put(img: &mut RgbImage, x: i64, y: i64, color: Rgb<u8>) {
    if x >= 0 && y >= 0 && x < i64::from(img.width()) && y < i64::from(img.height()) {
        img.put_pixel(x as u32, y as u32, color);
    }
}

/// One dot per point.
pub fn rasterize(cloud: &PointCloud, config: &RenderConfig) -> Result<RgbImage> {
    config.validate()?;
    if cloud.is_empty() {
        return Err(Error::Render("empty point cloud".into()));
    }
    let mut img = config.blank();
    let color = Rgb(config.foreground);
    let size = i64::from(config.point_size);
    let lo = -(size - 1) / 2;
    for &p in &cloud.points {
        let (fx, fy) = config.to_pixel(p);
        let (x, y) = (fx.floor() as i64, fy.floor() as i64);
        for dy in lo..lo + size {
            for dx in lo..lo + size {
                put(&mut img, x + dx, y + dy, color);
            }
        }
    }
    Ok(img)
}

fn draw_line(img: &mut RgbImage, from: (f64, f64), to: (f64, f64), color: Rgb<u8>) {
    let (mut x0, mut y0) = (from.0.floor() as i64, from.1.floor() as i64);
    let (x1, y1) = (to.0.floor() as i64, to.1.floor() as i64);
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        put(img, x0, y0, color);
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}

/// Stroked outlines of every figure, same viewport as [`rasterize`].
pub fn render_polygons(set: &PolygonSet, config: &RenderConfig) -> Result<RgbImage> {
    config.validate()?;
    if set.is_empty() {
        return Err(Error::Render("empty polygon set".into()));
    }
    let mut img = config.blank();
    let color = Rgb(config.foreground);
    for figure in &set.figures {
        for (a, b) in figure.segments() {
            draw_line(&mut img, config.to_pixel(a), config.to_pixel(b), color);
        }
    }
    Ok(img)
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)?;
    Ok(buf.into_inner())
}
