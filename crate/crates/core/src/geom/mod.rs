//! Cubic Bézier boundary curves and the bilinearly blended Coons patches
//! built from them.

mod bezier;
mod coons;
mod tessellate;

pub use bezier::{bernstein, bernstein_derivative, BezierCurve};
pub use coons::{CoonsBasis, CoonsPatch, PatchFrame, EPS_DEGENERATE};
pub use tessellate::{grid_index, grid_points, tessellate};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("curve parameter {0} outside [0, 1]")]
    CurveParameter(f64),
    #[error("patch parameter ({0}, {1}) outside [0, 1]^2")]
    PatchParameter(f64, f64),
    #[error("degenerate normal: area element {0:e} at or below threshold")]
    DegenerateNormal(f64),
}

#[inline]
pub(crate) fn in_unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}
