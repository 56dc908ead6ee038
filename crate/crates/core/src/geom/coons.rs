use crate::vec3::Vec3;

use super::bezier::{bernstein, bernstein_derivative, BezierCurve};
use super::{in_unit, GeomError};

/// Area elements at or below this are treated as having no normal.
pub const EPS_DEGENERATE: f64 = 1e-10;

/// Control-point slots of boundary curve `k` within the 12-point loop.
pub(crate) const CURVE_SLOTS: [[usize; 4]; 4] = [
    [0, 1, 2, 3],
    [3, 4, 5, 6],
    [6, 7, 8, 9],
    [9, 10, 11, 0],
];

/// Slots of the corners at parameters (0,0), (1,0), (1,1), (0,1).
pub(crate) const CORNER_SLOTS: [usize; 4] = [0, 3, 6, 9];

/// A Coons patch bounded by four cubic Bézier curves.
///
/// The twelve control points form one closed loop: curve `k` runs through
/// slots `3k..=3k+3` (the last curve wraps back to slot 0), so consecutive
/// curves share their endpoint by construction. With this layout
///
/// * `P(s, 0) = c1(s)`
/// * `P(1, t) = c2(t)`
/// * `P(s, 1) = c3(1 - s)`
/// * `P(0, t) = c4(1 - t)`
///
/// and `dP/ds x dP/dt` points to the side from which the loop appears
/// counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoonsPatch {
    pub control: [Vec3; 12],
}

/// Position and first partials of a patch at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatchFrame {
    pub position: Vec3,
    pub ds: Vec3,
    pub dt: Vec3,
}

impl PatchFrame {
    #[inline]
    pub fn cross(&self) -> Vec3 {
        self.ds.cross(self.dt)
    }

    /// `|det J|` of the 3x2 Jacobian, i.e. `|P_s x P_t|`.
    #[inline]
    pub fn area_element(&self) -> f64 {
        self.cross().norm()
    }

    pub fn normal(&self) -> Result<Vec3, GeomError> {
        let c = self.cross();
        let a = c.norm();
        if a.is_nan() || a <= EPS_DEGENERATE {
            return Err(GeomError::DegenerateNormal(a));
        }
        Ok(c / a)
    }
}

impl CoonsPatch {
    pub fn new(control: [Vec3; 12]) -> Self {
        CoonsPatch { control }
    }

    /// Builds a patch from four head-to-tail boundary curves.
    ///
    /// Only the first three points of each curve are read; the fourth is
    /// taken to be the first point of the next curve.
    pub fn from_curves(c: [BezierCurve; 4]) -> Self {
        let mut control = [Vec3::ZERO; 12];
        for (k, curve) in c.iter().enumerate() {
            control[3 * k..3 * k + 3].copy_from_slice(&curve.p[..3]);
        }
        CoonsPatch { control }
    }

    /// Boundary curve `k` (0-based, so `curve(0)` is c1).
    pub fn curve(&self, k: usize) -> BezierCurve {
        let s = CURVE_SLOTS[k];
        BezierCurve::new(
            self.control[s[0]],
            self.control[s[1]],
            self.control[s[2]],
            self.control[s[3]],
        )
    }

    pub fn corner(&self, k: usize) -> Vec3 {
        self.control[CORNER_SLOTS[k]]
    }

    pub fn map_points(&self, f: impl Fn(Vec3) -> Vec3) -> CoonsPatch {
        CoonsPatch {
            control: self.control.map(f),
        }
    }

    /// Same surface with the boundary loop traversed the other way
    /// (transposes the parameter square and flips the normal).
    pub fn reversed(&self) -> CoonsPatch {
        CoonsPatch {
            control: std::array::from_fn(|k| self.control[(12 - k) % 12]),
        }
    }

    fn check(s: f64, t: f64) -> Result<(), GeomError> {
        if in_unit(s) && in_unit(t) {
            Ok(())
        } else {
            Err(GeomError::PatchParameter(s, t))
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> Result<Vec3, GeomError> {
        Self::check(s, t)?;
        Ok(self.eval_unchecked(s, t))
    }

    pub(crate) fn eval_unchecked(&self, s: f64, t: f64) -> Vec3 {
        match (s, t) {
            (0.0, 0.0) => return self.control[0],
            (1.0, 0.0) => return self.control[3],
            (1.0, 1.0) => return self.control[6],
            (0.0, 1.0) => return self.control[9],
            _ => {}
        }
        let [c1, c2, c3, c4] = [0, 1, 2, 3].map(|k| self.curve(k));
        let ruled = c1.eval_unchecked(s) * (1.0 - t)
            + c3.eval_unchecked(1.0 - s) * t
            + c2.eval_unchecked(t) * s
            + c4.eval_unchecked(1.0 - t) * (1.0 - s);
        let bilinear = c1.p[0] * ((1.0 - s) * (1.0 - t))
            + c1.p[3] * (s * (1.0 - t))
            + c3.p[3] * ((1.0 - s) * t)
            + c3.p[0] * (s * t);
        ruled - bilinear
    }

    /// Exact first partial derivatives `(dP/ds, dP/dt)`.
    pub fn partials(&self, s: f64, t: f64) -> Result<(Vec3, Vec3), GeomError> {
        Self::check(s, t)?;
        let f = self.frame_unchecked(s, t);
        Ok((f.ds, f.dt))
    }

    pub fn frame(&self, s: f64, t: f64) -> Result<PatchFrame, GeomError> {
        Self::check(s, t)?;
        Ok(self.frame_unchecked(s, t))
    }

    pub(crate) fn frame_unchecked(&self, s: f64, t: f64) -> PatchFrame {
        let [c1, c2, c3, c4] = [0, 1, 2, 3].map(|k| self.curve(k));
        let (a, b, c, d) = (c1.p[0], c1.p[3], c3.p[3], c3.p[0]);
        let ds = c1.derivative_unchecked(s) * (1.0 - t) - c3.derivative_unchecked(1.0 - s) * t
            + c2.eval_unchecked(t)
            - c4.eval_unchecked(1.0 - t)
            - ((b - a) * (1.0 - t) + (d - c) * t);
        let dt = c3.eval_unchecked(1.0 - s) - c1.eval_unchecked(s) + c2.derivative_unchecked(t) * s
            - c4.derivative_unchecked(1.0 - t) * (1.0 - s)
            - ((c - a) * (1.0 - s) + (d - b) * s);
        PatchFrame {
            position: self.eval_unchecked(s, t),
            ds,
            dt,
        }
    }

    pub fn area_element(&self, s: f64, t: f64) -> Result<f64, GeomError> {
        Ok(self.frame(s, t)?.area_element())
    }

    pub fn normal(&self, s: f64, t: f64) -> Result<Vec3, GeomError> {
        self.frame(s, t)?.normal()
    }
}

/// Weights expressing `P`, `P_s` and `P_t` as linear combinations of the
/// twelve loop control points.
///
/// Every patch quantity is linear in the control points, so these weights
/// double as the Jacobian of the frame with respect to each control point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoonsBasis {
    pub value: [f64; 12],
    pub ds: [f64; 12],
    pub dt: [f64; 12],
}

impl CoonsBasis {
    pub fn at(s: f64, t: f64) -> Self {
        let mut value = [0.0; 12];
        let mut ds = [0.0; 12];
        let mut dt = [0.0; 12];
        let (bs, dbs) = (bernstein(s), bernstein_derivative(s));
        let (bt, dbt) = (bernstein(t), bernstein_derivative(t));
        let (brs, dbrs) = (bernstein(1.0 - s), bernstein_derivative(1.0 - s));
        let (brt, dbrt) = (bernstein(1.0 - t), bernstein_derivative(1.0 - t));
        for k in 0..4 {
            // (1 - t) c1(s)
            let i = CURVE_SLOTS[0][k];
            value[i] += (1.0 - t) * bs[k];
            ds[i] += (1.0 - t) * dbs[k];
            dt[i] -= bs[k];
            // s c2(t)
            let i = CURVE_SLOTS[1][k];
            value[i] += s * bt[k];
            ds[i] += bt[k];
            dt[i] += s * dbt[k];
            // t c3(1 - s)
            let i = CURVE_SLOTS[2][k];
            value[i] += t * brs[k];
            ds[i] -= t * dbrs[k];
            dt[i] += brs[k];
            // (1 - s) c4(1 - t)
            let i = CURVE_SLOTS[3][k];
            value[i] += (1.0 - s) * brt[k];
            ds[i] -= brt[k];
            dt[i] -= (1.0 - s) * dbrt[k];
        }
        // bilinear corner correction
        let corners = [
            (0, (1.0 - s) * (1.0 - t), -(1.0 - t), -(1.0 - s)),
            (3, s * (1.0 - t), 1.0 - t, -s),
            (9, (1.0 - s) * t, -t, 1.0 - s),
            (6, s * t, t, s),
        ];
        for (i, w, ws, wt) in corners {
            value[i] -= w;
            ds[i] -= ws;
            dt[i] -= wt;
        }
        CoonsBasis { value, ds, dt }
    }

    pub fn frame(&self, control: &[Vec3; 12]) -> PatchFrame {
        let mut f = PatchFrame {
            position: Vec3::ZERO,
            ds: Vec3::ZERO,
            dt: Vec3::ZERO,
        };
        for (k, q) in control.iter().enumerate() {
            f.position += *q * self.value[k];
            f.ds += *q * self.ds[k];
            f.dt += *q * self.dt[k];
        }
        f
    }
}
