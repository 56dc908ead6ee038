use crate::vec3::Vec3;

/// Affine map sending a point set into the unit cube: translate the
/// bounding-box minimum to the origin, then scale uniformly by the largest
/// extent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitCubeFrame {
    pub lo: Vec3,
    pub extent: f64,
    argmin: [usize; 3],
    argmax: usize,
    span_axis: usize,
}

impl UnitCubeFrame {
    pub fn of(points: &[Vec3]) -> Self {
        let mut argmin = [0usize; 3];
        let mut argmax = [0usize; 3];
        for (i, p) in points.iter().enumerate() {
            for a in 0..3 {
                if p[a] < points[argmin[a]][a] {
                    argmin[a] = i;
                }
                if p[a] > points[argmax[a]][a] {
                    argmax[a] = i;
                }
            }
        }
        let lo = Vec3::new(points[argmin[0]].x, points[argmin[1]].y, points[argmin[2]].z);
        let spans: [f64; 3] = std::array::from_fn(|a| points[argmax[a]][a] - points[argmin[a]][a]);
        let mut span_axis = 0;
        for a in 1..3 {
            if spans[a] > spans[span_axis] {
                span_axis = a;
            }
        }
        let extent = if spans[span_axis] > 0.0 { spans[span_axis] } else { 1.0 };
        UnitCubeFrame {
            lo,
            extent,
            argmin,
            argmax: argmax[span_axis],
            span_axis,
        }
    }

    pub fn apply(&self, p: Vec3) -> Vec3 {
        (p - self.lo) / self.extent
    }

    /// Flattened normalized coordinates.
    pub fn flatten(&self, points: &[Vec3]) -> Vec<f64> {
        points.iter().flat_map(|&p| self.apply(p).to_array()).collect()
    }

    /// Pulls a gradient with respect to the normalized coordinates back to
    /// the original points, including the dependence of the frame on the
    /// extreme points.
    pub fn backward(&self, points: &[Vec3], grad: &[f64]) -> Vec<Vec3> {
        let e = self.extent;
        let mut out: Vec<Vec3> = grad
            .chunks_exact(3)
            .map(|g| Vec3::new(g[0], g[1], g[2]) / e)
            .collect();
        let mut d_lo = Vec3::ZERO;
        let mut d_extent = 0.0;
        for (i, g) in grad.chunks_exact(3).enumerate() {
            let x = self.apply(points[i]);
            for a in 0..3 {
                d_lo[a] -= g[a] / e;
                d_extent -= g[a] * x[a] / e;
            }
        }
        for a in 0..3 {
            out[self.argmin[a]][a] += d_lo[a];
        }
        // extent = max - min along the span axis (constant if degenerate)
        if e != 1.0 || points[self.argmax][self.span_axis] != points[self.argmin[self.span_axis]][self.span_axis] {
            out[self.argmax][self.span_axis] += d_extent;
            out[self.argmin[self.span_axis]][self.span_axis] -= d_extent;
        }
        out
    }
}

/// Normalized flat coordinates of `points` plus the frame used.
pub fn normalize_to_unit_cube(points: &[Vec3]) -> (Vec<f64>, UnitCubeFrame) {
    let frame = UnitCubeFrame::of(points);
    (frame.flatten(points), frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lands_in_unit_cube() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pts: Vec<Vec3> = (0..12)
            .map(|_| Vec3::new(rng.random_range(-5.0..3.0), rng.random(), rng.random_range(2.0..4.0)))
            .collect();
        let (x, _) = normalize_to_unit_cube(&pts);
        assert!(x.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(x.iter().any(|&v| v == 1.0));
        for a in 0..3 {
            assert!(x.iter().skip(a).step_by(3).any(|&v| v == 0.0));
        }
    }

    #[test]
    fn backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let pts: Vec<Vec3> = (0..8)
                .map(|_| Vec3::new(rng.random(), rng.random(), rng.random()))
                .collect();
            let w: Vec<f64> = (0..24).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = |p: &[Vec3]| -> f64 {
                let (x, _) = normalize_to_unit_cube(p);
                x.iter().zip(&w).map(|(a, b)| a * b).sum()
            };
            let frame = UnitCubeFrame::of(&pts);
            let g = frame.backward(&pts, &w);
            let h = 1e-7;
            for i in 0..8 {
                for a in 0..3 {
                    let mut up = pts.clone();
                    let mut dn = pts.clone();
                    up[i][a] += h;
                    dn[i][a] -= h;
                    let fd = (f(&up) - f(&dn)) / (2.0 * h);
                    assert!((fd - g[i][a]).abs() < 1e-6, "point {i} axis {a}: {fd} vs {}", g[i][a]);
                }
            }
        }
    }

    #[test]
    fn coincident_points_do_not_divide_by_zero() {
        let pts = vec![Vec3::splat(2.0); 4];
        let (x, _) = normalize_to_unit_cube(&pts);
        assert!(x.iter().all(|&v| v == 0.0));
    }
}
