use crate::mesh::{SpatialIndex, SurfaceSample};
use crate::template::PatchCollection;
use crate::vec3::Vec3;

use super::sampling::{draw_params, nearest_targets, evaluate, Assignment, PatchPoint, Scatter};
use super::LossError;

/// Area-weighted mean of `1 - <n_target, n_patch>^2`; `weight` scales the
/// gradient.
pub(crate) fn normal_term(
    points: &[PatchPoint],
    pool: &[SurfaceSample],
    assignment: &Assignment,
    weight: f64,
    scatter: Option<&mut Scatter>,
) -> Result<f64, LossError> {
    let mut area = 0.0;
    let mut weighted = 0.0;
    let mut dn = vec![0.0; points.len()];
    for (j, p) in points.iter().enumerate() {
        if p.is_degenerate() {
            continue;
        }
        let n = p.frame.cross() / p.area();
        let c = n.dot(pool[assignment.to_target[j]].normal);
        dn[j] = 1.0 - c * c;
        area += p.area();
        weighted += p.area() * dn[j];
    }
    if area == 0.0 {
        return Err(LossError::AllDegenerate);
    }
    let mean = weighted / area;
    if let Some(scatter) = scatter {
        for (j, p) in points.iter().enumerate() {
            if p.is_degenerate() {
                continue;
            }
            let a = p.area();
            let n = p.frame.cross() / a;
            let m = pool[assignment.to_target[j]].normal;
            let c = n.dot(m);
            // dL/dn, then through n = c / |c| and the area weight
            let g = m * (-2.0 * c * a / area);
            let tangential = (g - n * g.dot(n)) / a;
            let d_cross = n * ((dn[j] - mean) / area) + tangential;
            scatter.add_cross(p, d_cross * weight);
        }
    }
    Ok(mean)
}

/// Normal loss and gradient for a fixed draw and assignment.
pub fn normal_with(
    pc: &PatchCollection,
    points: &[PatchPoint],
    pool: &[SurfaceSample],
    assignment: &Assignment,
) -> Result<(f64, Vec<Vec3>), LossError> {
    let mut scatter = Scatter::new(pc);
    let v = normal_term(points, pool, assignment, 1.0, Some(&mut scatter))?;
    Ok((v, scatter.gradient))
}

/// Area-weighted normal misalignment against the nearest target sample.
pub fn normal_loss(
    pc: &PatchCollection,
    target_index: &SpatialIndex,
    n_patch_samples: usize,
    seed: u64,
) -> Result<(f64, Vec<Vec3>), LossError> {
    if n_patch_samples == 0 {
        return Err(LossError::NoPatchSamples);
    }
    let points = evaluate(pc, &draw_params(pc.len(), n_patch_samples, seed));
    let assignment = Assignment {
        to_target: nearest_targets(&points, target_index)?,
        to_patch: Vec::new(),
    };
    normal_with(pc, &points, target_index.samples(), &assignment)
}
