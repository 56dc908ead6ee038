//! Direct optimization of template control points against a target mesh.

mod export;

pub use export::{export_fit, ExportError, ExportPaths};

use std::io::Write;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::intersect::{IntersectError, MlpClassifier};
use crate::losses::{total_loss, Classifiers, DecaySchedule, LossError, LossInputs, LossOptions, LossWeights};
use crate::mesh::{sample_surface, MeshError, SpatialIndex, TriangleMesh};
use crate::optim::{Adam, AdamConfig};
use crate::template::{PatchCollection, Template};
use crate::vec3::{Aabb, Vec3};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub iterations: usize,
    /// Adam step size.
    pub step: f64,
    pub weights: LossWeights,
    pub decay: DecaySchedule,
    pub patch_samples: usize,
    /// Target samples per iteration for the target-to-patch term.
    pub target_samples: usize,
    /// Size of the dense target sample pool searched by the
    /// patch-to-target and normal terms.
    pub target_pool: usize,
    pub seed: u64,
    pub intersection: bool,
    pub self_classifier: Option<PathBuf>,
    pub pair_classifier: Option<PathBuf>,
    /// Rescale and center the target into the template's box.
    pub normalize_target: bool,
    pub loss: LossOptions,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            iterations: 2000,
            step: 1e-4,
            weights: LossWeights::default(),
            decay: DecaySchedule::default(),
            patch_samples: 5000,
            target_samples: 5000,
            target_pool: 500_000,
            seed: 0,
            intersection: false,
            self_classifier: None,
            pair_classifier: None,
            normalize_target: true,
            loss: LossOptions::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FitError {
    #[error("invalid fit configuration: {0}")]
    Config(String),
    #[error("template is invalid:\n{0}")]
    Template(String),
    #[error("target mesh: {0}")]
    Target(#[from] MeshError),
    #[error("intersection losses are enabled but the {0} classifier path is not set")]
    MissingClassifier(&'static str),
    #[error("classifier: {0}")]
    Classifier(#[from] IntersectError),
    #[error(transparent)]
    Loss(#[from] LossError),
    #[error("non-finite loss at iteration {iteration}")]
    Diverged { iteration: usize, last: Box<FitResult> },
}

impl FitConfig {
    pub fn validate(&self) -> Result<(), FitError> {
        let bad = |m: &str| Err(FitError::Config(m.to_string()));
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step must be positive");
        }
        if self.patch_samples == 0 || self.target_samples == 0 || self.target_pool == 0 {
            return bad("sample counts must be at least 1");
        }
        if !self.weights.is_valid() {
            return bad("loss weights must be finite and non-negative");
        }
        if !(self.decay.gamma > 0.0 && self.decay.gamma < 1.0 && self.decay.period > 0.0) {
            return bad("decay needs 0 < gamma < 1 and period > 0");
        }
        Ok(())
    }
}

/// Uniform scale and translation taking target coordinates into the
/// template frame: `x' = (x - from) * scale + to`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetTransform {
    pub from: Vec3,
    pub scale: f64,
    pub to: Vec3,
}

impl TargetTransform {
    pub fn identity() -> Self {
        TargetTransform {
            from: Vec3::ZERO,
            scale: 1.0,
            to: Vec3::ZERO,
        }
    }

    /// Matches the target's bounding-box diagonal and center to the
    /// template's.
    pub fn fitting(target: &Aabb, template: &Aabb) -> Self {
        let d = target.diagonal();
        TargetTransform {
            from: target.center(),
            scale: if d > 0.0 { template.diagonal() / d } else { 1.0 },
            to: template.center(),
        }
    }

    pub fn apply(&self, x: Vec3) -> Vec3 {
        (x - self.from) * self.scale + self.to
    }

    pub fn inverse(&self, x: Vec3) -> Vec3 {
        (x - self.to) / self.scale + self.from
    }
}

/// Loss terms of one iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LossRecord {
    pub iteration: usize,
    pub chamfer: f64,
    pub normal: f64,
    pub template: f64,
    pub self_x: f64,
    pub pair_x: f64,
    pub total: f64,
    pub grad_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    /// Best iterate in the template frame.
    pub pc: PatchCollection,
    pub transform: TargetTransform,
    pub history: Vec<LossRecord>,
    /// Loss of `pc`.
    pub best: LossRecord,
    pub elapsed: Duration,
    /// The total loss plateaued over the final iterations.
    pub converged: bool,
}

impl FitResult {
    /// Best iterate mapped back to the target's coordinates.
    pub fn pc_in_target_frame(&self) -> PatchCollection {
        let t = self.transform;
        self.pc.map_points(|p| t.inverse(p))
    }
}

/// Seed of iteration `k` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    let mut z = seed.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn load_classifiers(cfg: &FitConfig) -> Result<Option<(MlpClassifier, MlpClassifier)>, FitError> {
    if !cfg.intersection {
        return Ok(None);
    }
    let f = cfg.self_classifier.as_ref().ok_or(FitError::MissingClassifier("self-intersection"))?;
    let g = cfg.pair_classifier.as_ref().ok_or(FitError::MissingClassifier("pair-intersection"))?;
    Ok(Some((MlpClassifier::load(f)?, MlpClassifier::load(g)?)))
}

/// Optimizes the template's control points against `target`, starting
/// from the rest pose. Classifiers are read from the configured paths
/// when intersection losses are on.
pub fn fit_template(template: &Template, target: &TriangleMesh, cfg: &FitConfig) -> Result<FitResult, FitError> {
    let classifiers = load_classifiers(cfg)?;
    fit_template_with(template, target, cfg, classifiers.as_ref().map(|(f, g)| (f, g)))
}

pub fn fit_template_with(
    template: &Template,
    target: &TriangleMesh,
    cfg: &FitConfig,
    classifiers: Option<(&MlpClassifier, &MlpClassifier)>,
) -> Result<FitResult, FitError> {
    cfg.validate()?;
    let report = template.validate();
    if !report.is_valid() {
        return Err(FitError::Template(report.to_string()));
    }
    let start = Instant::now();
    let transform = match (cfg.normalize_target, target.bounds(), template.bounds()) {
        (true, Some(tb), Some(pb)) => TargetTransform::fitting(&tb, &pb),
        _ => TargetTransform::identity(),
    };
    let target = target.map_vertices(|v| transform.apply(v));
    let pool = sample_surface(&target, cfg.target_pool, derive_seed(cfg.seed, u64::MAX))?;
    let index = SpatialIndex::build(pool)?;

    let mut weights = cfg.weights;
    if classifiers.is_none() {
        weights.self_x = 0.0;
        weights.pair_x = 0.0;
    }
    let mut pc = template.rest_pose();
    let mut adam = Adam::new(
        AdamConfig {
            learning_rate: cfg.step,
            ..AdamConfig::default()
        },
        3 * pc.points.len(),
    );
    let mut flat: Vec<f64> = pc.points.iter().flat_map(|p| p.to_array()).collect();
    let mut history = Vec::with_capacity(cfg.iterations);
    let mut best: Option<(LossRecord, PatchCollection)> = None;

    let evaluate = |pc: &PatchCollection, iteration: usize| -> Result<(LossRecord, Vec<f64>), FitError> {
        let seed = derive_seed(cfg.seed, iteration as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7A26_E7C0);
        let subset: Vec<_> = (0..cfg.target_samples)
            .map(|_| index.samples()[rng.random_range(0..index.len())])
            .collect();
        let inputs = LossInputs {
            template,
            target_index: &index,
            target_samples: &subset,
            n_patch_samples: cfg.patch_samples,
            classifiers: classifiers.map(|(f, g)| Classifiers { self_x: f, pair_x: g }),
            options: cfg.loss,
        };
        let b = total_loss(pc, &inputs, &weights, &cfg.decay.at(iteration), seed)?;
        let record = LossRecord {
            iteration,
            chamfer: b.chamfer,
            normal: b.normal,
            template: b.template,
            self_x: b.self_x,
            pair_x: b.pair_x,
            total: b.total,
            grad_max: b.gradient_max_norm(),
        };
        let finite = b.is_finite();
        let grad = b.gradient.iter().flat_map(|g| g.to_array()).collect();
        Ok((if finite { record } else { LossRecord { total: f64::NAN, ..record } }, grad))
    };

    let finish = |pc: PatchCollection, best: LossRecord, history: Vec<LossRecord>| FitResult {
        converged: plateaued(&history),
        pc,
        transform,
        history,
        best,
        elapsed: start.elapsed(),
    };

    for iteration in 0..cfg.iterations {
        let (record, grad) = evaluate(&pc, iteration)?;
        if !record.total.is_finite() {
            log::error!("non-finite loss at iteration {iteration}; returning last finite state");
            let (b, bpc) = best.unwrap_or_else(|| (record, pc.clone()));
            return Err(FitError::Diverged {
                iteration,
                last: Box::new(finish(bpc, b, history)),
            });
        }
        history.push(record);
        if best.as_ref().is_none_or(|(b, _)| record.total < b.total) {
            best = Some((record, pc.clone()));
        }
        if iteration % 100 == 0 {
            log::info!(
                "iter {iteration}: total {:.6e} chamfer {:.6e} normal {:.4e}",
                record.total,
                record.chamfer,
                record.normal
            );
        }
        adam.step(&mut flat, &grad);
        for (p, c) in pc.points.iter_mut().zip(flat.chunks_exact(3)) {
            *p = Vec3::new(c[0], c[1], c[2]);
        }
    }
    let (best, best_pc) = match best {
        Some(b) => b,
        None => (evaluate(&pc, 0)?.0, pc),
    };
    Ok(finish(best_pc, best, history))
}

fn plateaued(history: &[LossRecord]) -> bool {
    const W: usize = 50;
    if history.len() < 2 * W {
        return false;
    }
    let mean = |s: &[LossRecord]| s.iter().map(|r| r.total).sum::<f64>() / s.len() as f64;
    let n = history.len();
    let last = mean(&history[n - W..]);
    let prev = mean(&history[n - 2 * W..n - W]);
    (prev - last).abs() <= 0.01 * prev.abs().max(f64::MIN_POSITIVE)
}

pub const HISTORY_HEADER: &str = "iter\tchamfer\tnormal\ttemplate\tself_x\tpair_x\ttotal\tgrad_max";

/// Tab-separated history log with a header line.
pub fn write_history(history: &[LossRecord], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{HISTORY_HEADER}")?;
    for r in history {
        writeln!(
            out,
            "{}\t{:e}\t{:e}\t{:e}\t{:e}\t{:e}\t{:e}\t{:e}",
            r.iteration, r.chamfer, r.normal, r.template, r.self_x, r.pair_x, r.total, r.grad_max
        )?;
    }
    Ok(())
}
