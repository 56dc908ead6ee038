use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geom::{CoonsBasis, PatchFrame, EPS_DEGENERATE};
use crate::mesh::{KdTree, SpatialIndex, SurfaceSample};
use crate::template::PatchCollection;
use crate::vec3::Vec3;

use super::LossError;

/// One Monte-Carlo parameter sample on patch `patch`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatchParam {
    pub patch: usize,
    pub s: f64,
    pub t: f64,
}

/// `ceil(n / patches)` uniform parameter samples per patch, determined by
/// `seed` alone.
pub fn draw_params(num_patches: usize, n: usize, seed: u64) -> Vec<PatchParam> {
    let per_patch = n.div_ceil(num_patches.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_patch * num_patches);
    for patch in 0..num_patches {
        for _ in 0..per_patch {
            out.push(PatchParam {
                patch,
                s: rng.random(),
                t: rng.random(),
            });
        }
    }
    out
}

/// A patch sample evaluated on concrete control points.
#[derive(Clone, Copy, Debug)]
pub struct PatchPoint {
    pub param: PatchParam,
    pub basis: CoonsBasis,
    pub frame: PatchFrame,
}

impl PatchPoint {
    pub fn area(&self) -> f64 {
        self.frame.area_element()
    }

    pub fn is_degenerate(&self) -> bool {
        self.area() <= EPS_DEGENERATE
    }
}

pub fn evaluate(pc: &PatchCollection, params: &[PatchParam]) -> Vec<PatchPoint> {
    let controls: Vec<[Vec3; 12]> = pc.iter_patches().map(|p| p.control).collect();
    params
        .par_iter()
        .map(|&param| {
            let basis = CoonsBasis::at(param.s, param.t);
            PatchPoint {
                param,
                basis,
                frame: basis.frame(&controls[param.patch]),
            }
        })
        .collect()
}

/// Nearest-neighbour pairing frozen for one loss evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    /// For each patch sample, the nearest sample of the target index.
    pub to_target: Vec<usize>,
    /// For each target sample, the nearest patch sample.
    pub to_patch: Vec<usize>,
}

pub fn nearest_targets(points: &[PatchPoint], index: &SpatialIndex) -> Result<Vec<usize>, LossError> {
    if index.is_empty() {
        return Err(LossError::EmptyTarget);
    }
    Ok(points.par_iter().map(|p| index.nearest_index(p.frame.position).0).collect())
}

pub fn nearest_patch_samples(points: &[PatchPoint], target: &[SurfaceSample]) -> Result<Vec<usize>, LossError> {
    if target.is_empty() {
        return Err(LossError::EmptyTarget);
    }
    let tree = KdTree::new(points.iter().map(|p| p.frame.position).collect()).map_err(|_| LossError::NoPatchSamples)?;
    Ok(target.par_iter().map(|y| tree.nearest(y.position).0).collect())
}

pub fn assign(points: &[PatchPoint], index: &SpatialIndex, target: &[SurfaceSample]) -> Result<Assignment, LossError> {
    Ok(Assignment {
        to_target: nearest_targets(points, index)?,
        to_patch: nearest_patch_samples(points, target)?,
    })
}

/// Accumulates per-sample derivatives with respect to position and the two
/// partials into control-point gradients.
pub struct Scatter<'a> {
    pc: &'a PatchCollection,
    pub gradient: Vec<Vec3>,
}

impl<'a> Scatter<'a> {
    pub fn new(pc: &'a PatchCollection) -> Self {
        Scatter {
            pc,
            gradient: vec![Vec3::ZERO; pc.points.len()],
        }
    }

    pub fn add(&mut self, p: &PatchPoint, d_position: Vec3, d_ds: Vec3, d_dt: Vec3) {
        let idx = &self.pc.patches[p.param.patch].indices;
        for k in 0..12 {
            let b = &p.basis;
            self.gradient[idx[k]] += d_position * b.value[k] + d_ds * b.ds[k] + d_dt * b.dt[k];
        }
    }

    /// Adds the contribution of `dL/dc`, where `c = P_s x P_t`.
    pub fn add_cross(&mut self, p: &PatchPoint, d_cross: Vec3) {
        let f = &p.frame;
        self.add(p, Vec3::ZERO, f.dt.cross(d_cross), d_cross.cross(f.ds));
    }
}
