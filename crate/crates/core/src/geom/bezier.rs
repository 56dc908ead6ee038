use crate::vec3::Vec3;

use super::{in_unit, GeomError};

/// Cubic Bernstein basis at `g`.
#[inline]
pub fn bernstein(g: f64) -> [f64; 4] {
    let h = 1.0 - g;
    [h * h * h, 3.0 * g * h * h, 3.0 * g * g * h, g * g * g]
}

/// Derivative of the cubic Bernstein basis at `g`.
#[inline]
pub fn bernstein_derivative(g: f64) -> [f64; 4] {
    let h = 1.0 - g;
    [
        -3.0 * h * h,
        3.0 * h * h - 6.0 * g * h,
        6.0 * g * h - 3.0 * g * g,
        3.0 * g * g,
    ]
}

/// Cubic Bézier curve through `p[0]` and `p[3]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BezierCurve {
    pub p: [Vec3; 4],
}

impl BezierCurve {
    pub fn new(p1: Vec3, p2: Vec3, p3: Vec3, p4: Vec3) -> Self {
        BezierCurve { p: [p1, p2, p3, p4] }
    }

    pub fn eval(&self, g: f64) -> Result<Vec3, GeomError> {
        if !in_unit(g) {
            return Err(GeomError::CurveParameter(g));
        }
        Ok(self.eval_unchecked(g))
    }

    /// Endpoints are returned bitwise, not through the polynomial.
    #[inline]
    pub(crate) fn eval_unchecked(&self, g: f64) -> Vec3 {
        if g == 0.0 {
            return self.p[0];
        }
        if g == 1.0 {
            return self.p[3];
        }
        let b = bernstein(g);
        self.p[0] * b[0] + self.p[1] * b[1] + self.p[2] * b[2] + self.p[3] * b[3]
    }

    pub fn derivative(&self, g: f64) -> Result<Vec3, GeomError> {
        if !in_unit(g) {
            return Err(GeomError::CurveParameter(g));
        }
        Ok(self.derivative_unchecked(g))
    }

    #[inline]
    pub(crate) fn derivative_unchecked(&self, g: f64) -> Vec3 {
        let b = bernstein_derivative(g);
        self.p[0] * b[0] + self.p[1] * b[1] + self.p[2] * b[2] + self.p[3] * b[3]
    }

    pub fn reversed(&self) -> BezierCurve {
        let [a, b, c, d] = self.p;
        BezierCurve::new(d, c, b, a)
    }
}
