use crate::mesh::{SpatialIndex, SurfaceSample};
use crate::template::PatchCollection;
use crate::vec3::Vec3;

use super::sampling::{assign, draw_params, evaluate, Assignment, PatchPoint, Scatter};
use super::{AreaNormalization, DistanceKind, LossError, LossOptions};

impl DistanceKind {
    pub fn eval(self, x: Vec3, y: Vec3) -> f64 {
        match self {
            DistanceKind::Squared => x.distance_squared(y),
            DistanceKind::Euclidean => x.distance(y),
        }
    }

    /// Derivative with respect to `x`; zero at coincidence for the
    /// Euclidean form.
    pub fn gradient(self, x: Vec3, y: Vec3) -> Vec3 {
        match self {
            DistanceKind::Squared => (x - y) * 2.0,
            DistanceKind::Euclidean => {
                let d = x.distance(y);
                if d < 1e-12 {
                    Vec3::ZERO
                } else {
                    (x - y) / d
                }
            }
        }
    }
}

/// Directed terms of the symmetric Chamfer distance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChamferParts {
    /// Area-weighted patch-to-target average.
    pub to_target: f64,
    /// Mean target-to-patch distance.
    pub to_patch: f64,
}

impl ChamferParts {
    pub fn total(&self) -> f64 {
        self.to_target + self.to_patch
    }
}

/// Area-weighted patch-to-target term; `weight` scales the gradient.
pub(crate) fn to_target_term(
    points: &[PatchPoint],
    pool: &[SurfaceSample],
    assignment: &Assignment,
    options: &LossOptions,
    num_patches: usize,
    weight: f64,
    scatter: Option<&mut Scatter>,
) -> Result<f64, LossError> {
    // group g collects the samples sharing one normalizer
    let group = |p: &PatchPoint| match options.normalization {
        AreaNormalization::Global => 0,
        AreaNormalization::PerPatch => p.param.patch,
    };
    let groups = match options.normalization {
        AreaNormalization::Global => 1,
        AreaNormalization::PerPatch => num_patches,
    };
    let mut area = vec![0.0; groups];
    let mut weighted = vec![0.0; groups];
    let mut dist = vec![0.0; points.len()];
    for (j, p) in points.iter().enumerate() {
        if p.is_degenerate() {
            continue;
        }
        let y = pool[assignment.to_target[j]].position;
        dist[j] = options.distance.eval(p.frame.position, y);
        area[group(p)] += p.area();
        weighted[group(p)] += p.area() * dist[j];
    }
    if area.iter().all(|&w| w == 0.0) {
        return Err(LossError::AllDegenerate);
    }
    let mean: Vec<f64> = weighted.iter().zip(&area).map(|(s, w)| if *w > 0.0 { s / w } else { 0.0 }).collect();
    if let Some(scatter) = scatter {
        for (j, p) in points.iter().enumerate() {
            if p.is_degenerate() {
                continue;
            }
            let g = group(p);
            let w = area[g];
            let y = pool[assignment.to_target[j]].position;
            let d_pos = options.distance.gradient(p.frame.position, y) * (weight * p.area() / w);
            let d_area = weight * (dist[j] - mean[g]) / w;
            let n = p.frame.cross() / p.area();
            scatter.add(p, d_pos, Vec3::ZERO, Vec3::ZERO);
            scatter.add_cross(p, n * d_area);
        }
    }
    Ok(mean.iter().sum())
}

/// Mean over target samples of the distance to the assigned patch sample.
pub(crate) fn to_patch_term(
    points: &[PatchPoint],
    target: &[SurfaceSample],
    assignment: &Assignment,
    options: &LossOptions,
    weight: f64,
    scatter: Option<&mut Scatter>,
) -> f64 {
    let k = target.len() as f64;
    let mut sum = 0.0;
    for (y, &j) in target.iter().zip(&assignment.to_patch) {
        sum += options.distance.eval(points[j].frame.position, y.position);
    }
    if let Some(scatter) = scatter {
        for (y, &j) in target.iter().zip(&assignment.to_patch) {
            let p = &points[j];
            let g = options.distance.gradient(p.frame.position, y.position) * (weight / k);
            scatter.add(p, g, Vec3::ZERO, Vec3::ZERO);
        }
    }
    sum / k
}

/// Chamfer value and gradient for a fixed draw and assignment.
pub fn chamfer_with(
    pc: &PatchCollection,
    points: &[PatchPoint],
    pool: &[SurfaceSample],
    target: &[SurfaceSample],
    assignment: &Assignment,
    options: &LossOptions,
) -> Result<(ChamferParts, Vec<Vec3>), LossError> {
    let mut scatter = Scatter::new(pc);
    let to_target = to_target_term(points, pool, assignment, options, pc.len(), 1.0, Some(&mut scatter))?;
    let to_patch = to_patch_term(points, target, assignment, options, 1.0, Some(&mut scatter));
    Ok((ChamferParts { to_target, to_patch }, scatter.gradient))
}

/// Like [`chamfer_with`], with the gradients of the patch-to-target and
/// target-to-patch directions kept apart.
pub fn chamfer_directions_with(
    pc: &PatchCollection,
    points: &[PatchPoint],
    pool: &[SurfaceSample],
    target: &[SurfaceSample],
    assignment: &Assignment,
    options: &LossOptions,
) -> Result<(ChamferParts, [Vec<Vec3>; 2]), LossError> {
    let mut a = Scatter::new(pc);
    let to_target = to_target_term(points, pool, assignment, options, pc.len(), 1.0, Some(&mut a))?;
    let mut b = Scatter::new(pc);
    let to_patch = to_patch_term(points, target, assignment, options, 1.0, Some(&mut b));
    Ok((ChamferParts { to_target, to_patch }, [a.gradient, b.gradient]))
}

/// Symmetric area-weighted Chamfer distance between the patches and a
/// target. Patch samples are drawn from `seed`; patch-to-target distances
/// use every sample of `target_index`, target-to-patch distances use
/// `target_samples`.
pub fn chamfer_loss(
    pc: &PatchCollection,
    target_index: &SpatialIndex,
    target_samples: &[SurfaceSample],
    n_patch_samples: usize,
    seed: u64,
    options: &LossOptions,
) -> Result<(f64, Vec<Vec3>), LossError> {
    if n_patch_samples == 0 {
        return Err(LossError::NoPatchSamples);
    }
    let points = evaluate(pc, &draw_params(pc.len(), n_patch_samples, seed));
    let assignment = assign(&points, target_index, target_samples)?;
    let (parts, grad) = chamfer_with(pc, &points, target_index.samples(), target_samples, &assignment, options)?;
    Ok((parts.total(), grad))
}
