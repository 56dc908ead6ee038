//! Fitting objective: area-weighted Chamfer distance, normal alignment,
//! decayed template regularizer and learned intersection penalties, each
//! with exact gradients with respect to the control points.

mod chamfer;
mod intersection;
mod normal;
pub mod sampling;
mod template;

pub use chamfer::{chamfer_directions_with, chamfer_loss, chamfer_with, ChamferParts};
pub use intersection::{intersection_losses, intersection_losses_weighted, scored_pairs};
pub use normal::{normal_loss, normal_with};
pub use sampling::{assign, draw_params, evaluate, Assignment, PatchParam, PatchPoint};
pub use template::{template_loss, DecaySchedule};

use serde::{Deserialize, Serialize};

use crate::intersect::{IntersectError, MlpClassifier};
use crate::mesh::{SpatialIndex, SurfaceSample};
use crate::template::{PatchCollection, Template};
use crate::vec3::Vec3;

use sampling::Scatter;

#[derive(Debug, thiserror::Error)]
pub enum LossError {
    #[error("every patch sample has a degenerate area element")]
    AllDegenerate,
    #[error("target sample set is empty")]
    EmptyTarget,
    #[error("at least one patch sample is required")]
    NoPatchSamples,
    #[error("expected {expected} control points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("intersection losses need both classifiers")]
    MissingClassifier,
    #[error(transparent)]
    Classifier(#[from] IntersectError),
}

/// Per-term weights of the total loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossWeights {
    pub chamfer: f64,
    pub normal: f64,
    pub template: f64,
    pub self_x: f64,
    pub pair_x: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights {
            chamfer: 1.0,
            normal: 0.05,
            template: 1.0,
            self_x: 0.01,
            pair_x: 0.01,
        }
    }
}

impl LossWeights {
    pub fn is_valid(&self) -> bool {
        [self.chamfer, self.normal, self.template, self.self_x, self.pair_x]
            .iter()
            .all(|w| *w >= 0.0 && w.is_finite())
    }

    pub fn uses_intersection(&self) -> bool {
        self.self_x > 0.0 || self.pair_x > 0.0
    }
}

/// Point-to-point distance inside the Chamfer terms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceKind {
    #[default]
    Squared,
    Euclidean,
}

/// How the patch-to-target term normalizes the area weights.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AreaNormalization {
    /// One normalizer over all patches.
    #[default]
    Global,
    /// Area-weighted average per patch, summed over patches.
    PerPatch,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossOptions {
    pub distance: DistanceKind,
    pub normalization: AreaNormalization,
}

#[derive(Clone, Copy, Debug)]
pub struct Classifiers<'a> {
    pub self_x: &'a MlpClassifier,
    pub pair_x: &'a MlpClassifier,
}

/// Everything the total loss depends on besides the control points.
#[derive(Clone, Copy, Debug)]
pub struct LossInputs<'a> {
    pub template: &'a Template,
    /// Dense target samples searched by the patch-to-target term.
    pub target_index: &'a SpatialIndex,
    /// Target samples driving the target-to-patch term.
    pub target_samples: &'a [SurfaceSample],
    pub n_patch_samples: usize,
    pub classifiers: Option<Classifiers<'a>>,
    pub options: LossOptions,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LossBreakdown {
    pub chamfer: f64,
    pub normal: f64,
    pub template: f64,
    pub self_x: f64,
    pub pair_x: f64,
    pub total: f64,
    pub gradient: Vec<Vec3>,
}

impl LossBreakdown {
    pub fn gradient_max_norm(&self) -> f64 {
        self.gradient.iter().map(|g| g.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.total.is_finite() && self.gradient.iter().all(|g| g.is_finite())
    }
}

/// Weighted sum of all terms. Chamfer and normal share the patch draw of
/// `seed`, identical to the draw of the individual term functions.
pub fn total_loss(
    pc: &PatchCollection,
    inputs: &LossInputs,
    weights: &LossWeights,
    sched: &DecaySchedule,
    seed: u64,
) -> Result<LossBreakdown, LossError> {
    if inputs.n_patch_samples == 0 {
        return Err(LossError::NoPatchSamples);
    }
    let points = evaluate(pc, &draw_params(pc.len(), inputs.n_patch_samples, seed));
    let assignment = assign(&points, inputs.target_index, inputs.target_samples)?;
    let pool = inputs.target_index.samples();
    let mut scatter = Scatter::new(pc);
    let to_target = chamfer::to_target_term(
        &points,
        pool,
        &assignment,
        &inputs.options,
        pc.len(),
        weights.chamfer,
        Some(&mut scatter),
    )?;
    let to_patch = chamfer::to_patch_term(
        &points,
        inputs.target_samples,
        &assignment,
        &inputs.options,
        weights.chamfer,
        Some(&mut scatter),
    );
    let normal = normal::normal_term(&points, pool, &assignment, weights.normal, Some(&mut scatter))?;
    let mut gradient = scatter.gradient;

    let (template, tgrad) = template_loss(pc, inputs.template, sched)?;
    for (g, t) in gradient.iter_mut().zip(&tgrad) {
        *g += *t * weights.template;
    }

    let (mut self_x, mut pair_x) = (0.0, 0.0);
    if let Some(c) = inputs.classifiers {
        let (s, p, igrad) = intersection_losses_weighted(pc, c.self_x, c.pair_x, weights.self_x, weights.pair_x)?;
        (self_x, pair_x) = (s, p);
        for (g, d) in gradient.iter_mut().zip(&igrad) {
            *g += *d;
        }
    } else if weights.uses_intersection() {
        return Err(LossError::MissingClassifier);
    }

    let chamfer = to_target + to_patch;
    let total = weights.chamfer * chamfer
        + weights.normal * normal
        + weights.template * template
        + weights.self_x * self_x
        + weights.pair_x * pair_x;
    Ok(LossBreakdown {
        chamfer,
        normal,
        template,
        self_x,
        pair_x,
        total,
        gradient,
    })
}
