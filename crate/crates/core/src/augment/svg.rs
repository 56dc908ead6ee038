use svgtypes::{PointsParser, SimplePathSegment, SimplifyingPathParser};

use super::drawing::{distance, Canvas, Point2, VectorDrawing};
use super::AugmentError;

/// Flattening tolerance in pixels.
pub const FLATTEN_TOLERANCE: f64 = 0.25;

/// Appends a flattened cubic to `out` (which already holds `p0`).
fn flatten_cubic(p0: Point2, p1: Point2, p2: Point2, p3: Point2, out: &mut Vec<Point2>, depth: u32) {
    // distance of the inner control points from the chord bounds the
    // deviation of the curve
    let chord = |p: Point2| {
        let (dx, dy) = (p3[0] - p0[0], p3[1] - p0[1]);
        let len = dx.hypot(dy);
        if len == 0.0 {
            distance(p, p0)
        } else {
            ((p[0] - p0[0]) * dy - (p[1] - p0[1]) * dx).abs() / len
        }
    };
    if depth >= 16 || chord(p1).max(chord(p2)) <= FLATTEN_TOLERANCE {
        out.push(p3);
        return;
    }
    let mid = |a: Point2, b: Point2| [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    let (p01, p12, p23) = (mid(p0, p1), mid(p1, p2), mid(p2, p3));
    let (p012, p123) = (mid(p01, p12), mid(p12, p23));
    let m = mid(p012, p123);
    flatten_cubic(p0, p01, p012, m, out, depth + 1);
    flatten_cubic(m, p123, p23, p3, out, depth + 1);
}

fn path_polylines(d: &str) -> Result<Vec<Vec<Point2>>, AugmentError> {
    let mut curves = Vec::new();
    let mut current: Vec<Point2> = Vec::new();
    let mut start = [0.0, 0.0];
    for seg in SimplifyingPathParser::from(d) {
        let seg = seg.map_err(|e| AugmentError::Invalid(format!("path data: {e}")))?;
        let last = current.last().copied().unwrap_or(start);
        match seg {
            SimplePathSegment::MoveTo { x, y } => {
                if current.len() >= 2 {
                    curves.push(std::mem::take(&mut current));
                }
                current.clear();
                start = [x, y];
                current.push(start);
            }
            SimplePathSegment::LineTo { x, y } => current.push([x, y]),
            SimplePathSegment::CurveTo { x1, y1, x2, y2, x, y } => {
                flatten_cubic(last, [x1, y1], [x2, y2], [x, y], &mut current, 0)
            }
            SimplePathSegment::Quadratic { x1, y1, x, y } => {
                let c1 = [last[0] + 2.0 / 3.0 * (x1 - last[0]), last[1] + 2.0 / 3.0 * (y1 - last[1])];
                let c2 = [x + 2.0 / 3.0 * (x1 - x), y + 2.0 / 3.0 * (y1 - y)];
                flatten_cubic(last, c1, c2, [x, y], &mut current, 0)
            }
            SimplePathSegment::ClosePath => current.push(start),
        }
    }
    if current.len() >= 2 {
        curves.push(current);
    }
    Ok(curves)
}

fn length_attr(node: &roxmltree::Node, name: &str) -> Option<f64> {
    let v = node.attribute(name)?;
    v.trim_end_matches("px").trim().parse().ok()
}

/// Imports `<path>`, `<polyline>` and `<line>` elements of a vector
/// document as open polylines. Transforms and styling are ignored; the
/// canvas comes from `viewBox` (whose origin is subtracted) or from
/// `width`/`height`.
pub fn import_svg(text: &str) -> Result<VectorDrawing, AugmentError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| AugmentError::Invalid(format!("svg: {e}")))?;
    let root = doc.root_element();
    let (origin, canvas) = match root.attribute("viewBox") {
        Some(vb) => {
            let v: svgtypes::ViewBox = vb.parse().map_err(|e| AugmentError::Invalid(format!("viewBox: {e}")))?;
            ([v.x, v.y], Canvas { width: v.w, height: v.h })
        }
        None => (
            [0.0, 0.0],
            Canvas {
                width: length_attr(&root, "width").ok_or_else(|| AugmentError::Invalid("svg has no size".into()))?,
                height: length_attr(&root, "height").ok_or_else(|| AugmentError::Invalid("svg has no size".into()))?,
            },
        ),
    };
    let mut curves = Vec::new();
    for node in root.descendants().filter(|n| n.is_element()) {
        match node.tag_name().name() {
            "path" => curves.extend(path_polylines(node.attribute("d").unwrap_or(""))?),
            "polyline" => {
                let pts: Vec<Point2> = PointsParser::from(node.attribute("points").unwrap_or(""))
                    .map(|(x, y)| [x, y])
                    .collect();
                if pts.len() >= 2 {
                    curves.push(pts);
                }
            }
            "line" => {
                let get = |k| length_attr(&node, k).unwrap_or(0.0);
                curves.push(vec![[get("x1"), get("y1")], [get("x2"), get("y2")]]);
            }
            _ => {}
        }
    }
    for c in &mut curves {
        for p in c.iter_mut() {
            p[0] -= origin[0];
            p[1] -= origin[1];
        }
    }
    let d = VectorDrawing { canvas, curves };
    d.validate()?;
    Ok(d.sanitized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::drawing::arc_length;

    #[test]
    fn lines_and_polylines() {
        let svg = r#"<svg xmlns="http://www.w3.org/2000/svg" width="100" height="50">
            <polyline points="0,0 10,0 10,10"/>
            <line x1="1" y1="2" x2="3" y2="4"/>
            <path d="M 0 40 L 20 40 M 50 10 h 10 v 10"/>
        </svg>"#;
        let d = import_svg(svg).unwrap();
        assert_eq!(d.canvas, Canvas { width: 100.0, height: 50.0 });
        assert_eq!(d.curves.len(), 4);
        assert_eq!(d.curves[0], vec![[0.0, 0.0], [10.0, 0.0], [10.0, 10.0]]);
        assert_eq!(d.curves[3], vec![[50.0, 10.0], [60.0, 10.0], [60.0, 20.0]]);
    }

    #[test]
    fn curves_flattened_within_tolerance() {
        // quarter circle of radius 100 as a cubic
        let k = 0.5522847498 * 100.0;
        let svg = format!(
            r#"<svg viewBox="0 0 200 200"><path d="M 100 0 C {} 0 200 {} 200 100"/></svg>"#,
            100.0 + k,
            100.0 - k
        );
        let d = import_svg(&svg).unwrap();
        let c = &d.curves[0];
        assert!(c.len() > 8);
        for p in c {
            let r = (p[0] - 100.0).hypot(p[1] - 100.0);
            assert!((r - 100.0).abs() < 0.3, "{r}");
        }
        assert!((arc_length(c) - std::f64::consts::PI * 50.0).abs() < 0.5);
    }

    #[test]
    fn viewbox_origin_is_removed() {
        let d = import_svg(r#"<svg viewBox="10 20 30 40"><line x1="10" y1="20" x2="40" y2="60"/></svg>"#).unwrap();
        assert_eq!(d.curves[0], vec![[0.0, 0.0], [30.0, 40.0]]);
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(import_svg("not xml").is_err());
        assert!(import_svg("<svg/>").is_err());
    }
}
