use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AugmentError;

pub type Point2 = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Canvas {
    pub width: f64,
    pub height: f64,
}

/// Open polylines in pixel coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorDrawing {
    pub canvas: Canvas,
    pub curves: Vec<Vec<Point2>>,
}

pub fn distance(a: Point2, b: Point2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn arc_length(curve: &[Point2]) -> f64 {
    curve.windows(2).map(|w| distance(w[0], w[1])).sum()
}

fn lerp(a: Point2, b: Point2, f: f64) -> Point2 {
    [a[0] + (b[0] - a[0]) * f, a[1] + (b[1] - a[1]) * f]
}

/// Piece of `curve` between arc-length positions `from <= to`.
pub fn sub_curve(curve: &[Point2], from: f64, to: f64) -> Vec<Point2> {
    let mut out = Vec::new();
    let mut walked = 0.0;
    for w in curve.windows(2) {
        let len = distance(w[0], w[1]);
        let (a, b) = (walked, walked + len);
        if b >= from && a <= to && len > 0.0 {
            if out.is_empty() {
                out.push(lerp(w[0], w[1], ((from - a) / len).clamp(0.0, 1.0)));
            }
            if b <= to {
                out.push(w[1]);
            } else {
                out.push(lerp(w[0], w[1], ((to - a) / len).clamp(0.0, 1.0)));
                break;
            }
        }
        walked = b;
    }
    out
}

impl VectorDrawing {
    pub fn total_length(&self) -> f64 {
        self.curves.iter().map(|c| arc_length(c)).sum()
    }

    /// Drops curves with fewer than two points and clamps the rest into
    /// the canvas.
    pub fn sanitized(mut self) -> Self {
        let (w, h) = (self.canvas.width, self.canvas.height);
        self.curves.retain(|c| c.len() >= 2);
        for c in &mut self.curves {
            for p in c.iter_mut() {
                p[0] = p[0].clamp(0.0, w);
                p[1] = p[1].clamp(0.0, h);
            }
        }
        self
    }

    pub fn validate(&self) -> Result<(), AugmentError> {
        if !(self.canvas.width > 0.0 && self.canvas.height > 0.0) {
            return Err(AugmentError::Invalid("canvas must have positive size".into()));
        }
        if let Some(k) = self.curves.iter().position(|c| c.len() < 2) {
            return Err(AugmentError::Invalid(format!("curve {k} has fewer than two points")));
        }
        if self.curves.iter().flatten().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(AugmentError::Invalid("non-finite coordinate".into()));
        }
        Ok(())
    }
}

pub fn parse_drawing(text: &str) -> Result<VectorDrawing, AugmentError> {
    let d: VectorDrawing = serde_json::from_str(text).map_err(|e| AugmentError::Invalid(e.to_string()))?;
    d.validate()?;
    Ok(d.sanitized())
}

pub fn load_drawing(path: impl AsRef<Path>) -> Result<VectorDrawing, AugmentError> {
    parse_drawing(&std::fs::read_to_string(path)?)
}

pub fn save_drawing(d: &VectorDrawing, path: impl AsRef<Path>) -> Result<(), AugmentError> {
    std::fs::write(path, serde_json::to_string_pretty(d).map_err(|e| AugmentError::Invalid(e.to_string()))?)?;
    Ok(())
}
