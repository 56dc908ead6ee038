use std::io::Write;
use std::path::Path;

use super::drawing::{Point2, VectorDrawing};
use super::AugmentError;

/// 8-bit grayscale image, row-major, 255 = white.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn blank(width: usize, height: usize) -> Self {
        GrayImage {
            width,
            height,
            pixels: vec![255; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Total ink in pixel units (a fully black pixel counts 1).
    pub fn ink(&self) -> f64 {
        self.pixels.iter().map(|&v| (255 - v) as f64 / 255.0).sum()
    }

    pub fn write_png(&self, out: impl Write) -> Result<(), AugmentError> {
        let mut enc = png::Encoder::new(out, self.width as u32, self.height as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header().map_err(|e| AugmentError::Image(e.to_string()))?;
        w.write_image_data(&self.pixels).map_err(|e| AugmentError::Image(e.to_string()))?;
        w.finish().map_err(|e| AugmentError::Image(e.to_string()))?;
        Ok(())
    }

    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<(), AugmentError> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_png(f)
    }
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

/// Strokes every curve with round caps and joins, `stroke_width` output
/// pixels wide, onto an `out_size` square. The canvas is scaled uniformly
/// to fit and centered. Coverage falls off linearly over one pixel at the
/// stroke boundary.
///
/// # Panics
/// If `stroke_width < 1` or `out_size < 16`.
pub fn rasterize(d: &VectorDrawing, stroke_width: f64, out_size: usize) -> GrayImage {
    assert!(stroke_width >= 1.0, "stroke width must be at least one pixel");
    assert!(out_size >= 16, "output must be at least 16 pixels");
    let size = out_size as f64;
    let scale = size / d.canvas.width.max(d.canvas.height);
    let off = [(size - d.canvas.width * scale) / 2.0, (size - d.canvas.height * scale) / 2.0];
    let map = |p: Point2| [p[0] * scale + off[0], p[1] * scale + off[1]];
    let half = stroke_width / 2.0;
    let mut coverage = vec![0.0f64; out_size * out_size];
    for curve in &d.curves {
        for w in curve.windows(2) {
            let (a, b) = (map(w[0]), map(w[1]));
            let reach = half + 1.0;
            let x0 = (a[0].min(b[0]) - reach).floor().max(0.0) as usize;
            let y0 = (a[1].min(b[1]) - reach).floor().max(0.0) as usize;
            let x1 = ((a[0].max(b[0]) + reach).ceil().max(0.0) as usize).min(out_size);
            let y1 = ((a[1].max(b[1]) + reach).ceil().max(0.0) as usize).min(out_size);
            for y in y0..y1 {
                for x in x0..x1 {
                    let dist = segment_distance([x as f64 + 0.5, y as f64 + 0.5], a, b);
                    let c = (half - dist + 0.5).clamp(0.0, 1.0);
                    let px = &mut coverage[y * out_size + x];
                    *px = px.max(c);
                }
            }
        }
    }
    GrayImage {
        width: out_size,
        height: out_size,
        pixels: coverage.iter().map(|c| (255.0 * (1.0 - c)).round() as u8).collect(),
    }
}
