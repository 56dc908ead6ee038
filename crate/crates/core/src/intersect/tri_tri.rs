//! Closed-triangle intersection tests driven by exact orientation
//! predicates.

use robust::{orient2d, orient3d, Coord, Coord3D};

use crate::vec3::Vec3;

#[inline]
fn c3(p: Vec3) -> Coord3D<f64> {
    Coord3D { x: p.x, y: p.y, z: p.z }
}

#[inline]
fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

#[inline]
fn orient(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> i8 {
    sign(orient3d(c3(a), c3(b), c3(c), c3(d)))
}

/// Drops coordinate `axis`.
#[inline]
fn project(p: Vec3, axis: usize) -> Coord<f64> {
    match axis {
        0 => Coord { x: p.y, y: p.z },
        1 => Coord { x: p.z, y: p.x },
        _ => Coord { x: p.x, y: p.y },
    }
}

#[inline]
fn orient_2d(a: Coord<f64>, b: Coord<f64>, c: Coord<f64>) -> i8 {
    sign(orient2d(a, b, c))
}

fn on_segment_2d(p: Coord<f64>, q: Coord<f64>, r: Coord<f64>) -> bool {
    r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
}

fn segments_2d(p: Coord<f64>, q: Coord<f64>, r: Coord<f64>, s: Coord<f64>) -> bool {
    let o1 = orient_2d(p, q, r);
    let o2 = orient_2d(p, q, s);
    let o3 = orient_2d(r, s, p);
    let o4 = orient_2d(r, s, q);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && on_segment_2d(p, q, r))
        || (o2 == 0 && on_segment_2d(p, q, s))
        || (o3 == 0 && on_segment_2d(r, s, p))
        || (o4 == 0 && on_segment_2d(r, s, q))
}

fn point_in_triangle_2d(p: Coord<f64>, t: [Coord<f64>; 3]) -> bool {
    let a = orient_2d(t[0], t[1], p);
    let b = orient_2d(t[1], t[2], p);
    let c = orient_2d(t[2], t[0], p);
    (a >= 0 && b >= 0 && c >= 0) || (a <= 0 && b <= 0 && c <= 0)
}

/// Coordinate axis along which projecting `t` loses the least area.
fn dominant_axis(t: &[Vec3; 3]) -> usize {
    let n = (t[1] - t[0]).cross(t[2] - t[0]);
    let a = [n.x.abs(), n.y.abs(), n.z.abs()];
    if a[0] >= a[1] && a[0] >= a[2] {
        0
    } else if a[1] >= a[2] {
        1
    } else {
        2
    }
}

fn segment_triangle_2d(p: Vec3, q: Vec3, t: &[Vec3; 3], axis: usize) -> bool {
    let tp = t.map(|v| project(v, axis));
    let (pp, qp) = (project(p, axis), project(q, axis));
    point_in_triangle_2d(pp, tp)
        || point_in_triangle_2d(qp, tp)
        || (0..3).any(|k| segments_2d(pp, qp, tp[k], tp[(k + 1) % 3]))
}

fn is_degenerate(t: &[Vec3; 3]) -> bool {
    (0..3).all(|axis| {
        let p = t.map(|v| project(v, axis));
        orient_2d(p[0], p[1], p[2]) == 0
    })
}

/// Longest edge of a collinear triple, which covers the other vertex.
fn spanning_edge(t: &[Vec3; 3]) -> (Vec3, Vec3) {
    let edges = [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])];
    *edges
        .iter()
        .max_by(|a, b| a.0.distance_squared(a.1).total_cmp(&b.0.distance_squared(b.1)))
        .unwrap()
}

/// Closed segment vs closed non-degenerate triangle.
fn segment_triangle(p: Vec3, q: Vec3, t: &[Vec3; 3]) -> bool {
    let op = orient(t[0], t[1], t[2], p);
    let oq = orient(t[0], t[1], t[2], q);
    if op * oq > 0 {
        return false;
    }
    if op == 0 && oq == 0 {
        return segment_triangle_2d(p, q, t, dominant_axis(t));
    }
    let a = orient(p, q, t[0], t[1]);
    let b = orient(p, q, t[1], t[2]);
    let c = orient(p, q, t[2], t[0]);
    (a >= 0 && b >= 0 && c >= 0) || (a <= 0 && b <= 0 && c <= 0)
}

fn segments_3d(p: Vec3, q: Vec3, r: Vec3, s: Vec3) -> bool {
    if orient(p, q, r, s) != 0 {
        return false;
    }
    (0..3).all(|axis| segments_2d(project(p, axis), project(q, axis), project(r, axis), project(s, axis)))
}

/// Floating-point supporting plane of a triangle with a conservative error
/// bound, used to reject pairs before the exact test.
#[derive(Clone, Copy, Debug)]
pub(crate) struct PlaneFilter {
    origin: Vec3,
    normal: Vec3,
    bound: f64,
}

impl PlaneFilter {
    pub(crate) fn new(t: &[Vec3; 3]) -> Self {
        let e1 = t[1] - t[0];
        let e2 = t[2] - t[0];
        PlaneFilter {
            origin: t[0],
            normal: e1.cross(e2),
            bound: 1e-13 * e1.norm() * e2.norm(),
        }
    }

    /// True only if every vertex of `t` lies strictly on one side of the
    /// plane, certified against rounding.
    pub(crate) fn separates(&self, t: &[Vec3; 3]) -> bool {
        let mut side = 0i8;
        for v in t {
            let w = *v - self.origin;
            let d = self.normal.dot(w);
            if d.abs() <= self.bound * (w.x.abs() + w.y.abs() + w.z.abs()) {
                return false;
            }
            let s = if d > 0.0 { 1 } else { -1 };
            if side != 0 && s != side {
                return false;
            }
            side = s;
        }
        true
    }
}

/// Whether two closed triangles share at least one point.
pub fn triangles_intersect(a: &[Vec3; 3], b: &[Vec3; 3]) -> bool {
    match (is_degenerate(a), is_degenerate(b)) {
        (true, true) => {
            let (p, q) = spanning_edge(a);
            let (r, s) = spanning_edge(b);
            return segments_3d(p, q, r, s);
        }
        (true, false) => {
            let (p, q) = spanning_edge(a);
            return segment_triangle(p, q, b);
        }
        (false, true) => {
            let (p, q) = spanning_edge(b);
            return segment_triangle(p, q, a);
        }
        (false, false) => {}
    }
    let da = a.map(|v| orient(b[0], b[1], b[2], v));
    if da.iter().all(|&s| s > 0) || da.iter().all(|&s| s < 0) {
        return false;
    }
    let db = b.map(|v| orient(a[0], a[1], a[2], v));
    if db.iter().all(|&s| s > 0) || db.iter().all(|&s| s < 0) {
        return false;
    }
    if da.iter().all(|&s| s == 0) {
        let axis = dominant_axis(b);
        let ap = a.map(|v| project(v, axis));
        let bp = b.map(|v| project(v, axis));
        return (0..3).any(|i| (0..3).any(|j| segments_2d(ap[i], ap[(i + 1) % 3], bp[j], bp[(j + 1) % 3])))
            || point_in_triangle_2d(ap[0], bp)
            || point_in_triangle_2d(bp[0], ap);
    }
    (0..3).any(|k| segment_triangle(a[k], a[(k + 1) % 3], b))
        || (0..3).any(|k| segment_triangle(b[k], b[(k + 1) % 3], a))
}
