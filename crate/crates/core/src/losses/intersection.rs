use crate::intersect::{MlpClassifier, UnitCubeFrame};
use crate::template::PatchCollection;
use crate::vec3::Vec3;

use super::LossError;

fn score(clf: &MlpClassifier, points: &[Vec3]) -> Result<(f64, Vec<Vec3>), LossError> {
    let frame = UnitCubeFrame::of(points);
    let (p, g) = clf.predict_with_gradient(&frame.flatten(points))?;
    Ok((p, frame.backward(points, &g)))
}

/// Pairs of patches that share no control point, both orders.
pub fn scored_pairs(pc: &PatchCollection) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..pc.len() {
        for j in 0..pc.len() {
            let shares = pc.patches[i].indices.iter().any(|k| pc.patches[j].indices.contains(k));
            if i != j && !shares {
                out.push((i, j));
            }
        }
    }
    out
}

/// Summed self- and pair-intersection scores of the learned classifiers
/// with the gradient of `w_self * self + w_pair * pair`.
pub fn intersection_losses_weighted(
    pc: &PatchCollection,
    f: &MlpClassifier,
    g: &MlpClassifier,
    w_self: f64,
    w_pair: f64,
) -> Result<(f64, f64, Vec<Vec3>), LossError> {
    let mut grad = vec![Vec3::ZERO; pc.points.len()];
    let mut self_x = 0.0;
    for topo in &pc.patches {
        let pts = topo.gather(&pc.points).control;
        let (v, d) = score(f, &pts)?;
        self_x += v;
        for (k, dk) in d.iter().enumerate() {
            grad[topo.indices[k]] += *dk * w_self;
        }
    }
    let mut pair_x = 0.0;
    for (i, j) in scored_pairs(pc) {
        let idx: Vec<usize> = pc.patches[i].indices.iter().chain(&pc.patches[j].indices).copied().collect();
        let pts: Vec<Vec3> = idx.iter().map(|&k| pc.points[k]).collect();
        let (v, d) = score(g, &pts)?;
        pair_x += v;
        for (k, dk) in idx.iter().zip(&d) {
            grad[*k] += *dk * w_pair;
        }
    }
    Ok((self_x, pair_x, grad))
}

/// Self score summed over patches and pair score summed over ordered
/// pairs of patches that share no control point, with the gradient of
/// their sum.
pub fn intersection_losses(pc: &PatchCollection, f: &MlpClassifier, g: &MlpClassifier) -> Result<(f64, f64, Vec<Vec3>), LossError> {
    intersection_losses_weighted(pc, f, g, 1.0, 1.0)
}
