use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::drawing::{arc_length, sub_curve, VectorDrawing};

/// Reference canvas size for `min_length`.
pub const REFERENCE_CANVAS: f64 = 512.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationMode {
    /// Each endpoint independently.
    #[default]
    PerEndpoint,
    /// Both endpoints together.
    PerCurve,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentParams {
    pub split_prob: f64,
    pub max_splits: usize,
    pub truncate_prob: f64,
    /// Fraction of arc length removed at a truncated endpoint.
    pub truncate_min: f64,
    pub truncate_max: f64,
    pub truncation_mode: TruncationMode,
    /// Removal threshold in pixels on a 512-pixel canvas; scaled with the
    /// larger canvas side.
    pub min_length: f64,
    /// Gap opened by a split, in pixels.
    pub gap: f64,
}

impl Default for AugmentParams {
    fn default() -> Self {
        AugmentParams {
            split_prob: 0.3,
            max_splits: 10,
            truncate_prob: 0.2,
            truncate_min: 0.02,
            truncate_max: 0.10,
            truncation_mode: TruncationMode::PerEndpoint,
            min_length: 8.0,
            gap: 4.0,
        }
    }
}

impl AugmentParams {
    pub fn is_valid(&self) -> bool {
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        unit(self.split_prob)
            && unit(self.truncate_prob)
            && unit(self.truncate_min)
            && unit(self.truncate_max)
            && self.truncate_min <= self.truncate_max
            && self.min_length >= 0.0
            && self.gap >= 0.0
    }

    pub fn min_length_for(&self, d: &VectorDrawing) -> f64 {
        self.min_length * d.canvas.width.max(d.canvas.height) / REFERENCE_CANVAS
    }
}

/// What one augmentation run did, with exact arc-length bookkeeping.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AugmentReport {
    pub split_trials: usize,
    pub splits: usize,
    /// Endpoints eligible for truncation.
    pub endpoints: usize,
    pub truncated_endpoints: usize,
    pub removed: usize,
    pub gap_length: f64,
    pub truncated_length: f64,
    pub removed_length: f64,
    /// No curve survived.
    pub empty: bool,
}

/// Splits, truncates and prunes the curves of `d`.
///
/// Each of `max_splits` trials succeeds with `split_prob` and cuts a
/// uniformly chosen curve at a uniform arc-length position, opening a gap
/// of `gap` pixels; curves no longer than the gap are left alone. Then
/// endpoints are truncated and short curves removed.
pub fn augment_contours(d: &VectorDrawing, p: &AugmentParams, seed: u64) -> (VectorDrawing, AugmentReport) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curves = d.curves.clone();
    let mut report = AugmentReport::default();

    for _ in 0..p.max_splits {
        if curves.is_empty() || !rng.random_bool(p.split_prob) {
            continue;
        }
        report.split_trials += 1;
        let k = rng.random_range(0..curves.len());
        let len = arc_length(&curves[k]);
        let u: f64 = rng.random();
        if len <= p.gap {
            continue;
        }
        let half = p.gap / 2.0;
        let at = half + u * (len - p.gap);
        let head = sub_curve(&curves[k], 0.0, at - half);
        let tail = sub_curve(&curves[k], at + half, len);
        if head.len() < 2 || tail.len() < 2 {
            continue;
        }
        report.gap_length += len - arc_length(&head) - arc_length(&tail);
        curves[k] = head;
        curves.insert(k + 1, tail);
        report.splits += 1;
    }

    for c in &mut curves {
        let len = arc_length(c);
        let cut = |rng: &mut ChaCha8Rng| rng.random_range(p.truncate_min..=p.truncate_max) * len;
        let (front, back) = match p.truncation_mode {
            TruncationMode::PerEndpoint => {
                report.endpoints += 2;
                let f = if rng.random_bool(p.truncate_prob) { cut(&mut rng) } else { 0.0 };
                let b = if rng.random_bool(p.truncate_prob) { cut(&mut rng) } else { 0.0 };
                (f, b)
            }
            TruncationMode::PerCurve => {
                report.endpoints += 2;
                if rng.random_bool(p.truncate_prob) {
                    (cut(&mut rng), cut(&mut rng))
                } else {
                    (0.0, 0.0)
                }
            }
        };
        report.truncated_endpoints += (front > 0.0) as usize + (back > 0.0) as usize;
        if front > 0.0 || back > 0.0 {
            let kept = sub_curve(c, front, len - back);
            report.truncated_length += len - arc_length(&kept);
            *c = kept;
        }
    }

    let threshold = p.min_length_for(d);
    let before = curves.len();
    curves.retain(|c| {
        let len = arc_length(c);
        let keep = c.len() >= 2 && len >= threshold;
        if !keep {
            report.removed_length += len;
        }
        keep
    });
    report.removed = before - curves.len();
    report.empty = curves.is_empty();
    if report.empty {
        log::warn!("augmentation removed every curve");
    }
    (
        VectorDrawing {
            canvas: d.canvas,
            curves,
        },
        report,
    )
}
