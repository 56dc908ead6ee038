use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::optim::{Adam, AdamConfig};

use super::dataset::{IntersectionDataset, IntersectionSample};
use super::isometry::Isometry;
use super::mlp::{standard_widths, Mlp, MlpClassifier};
use super::IntersectError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Dropout keep probability on hidden layers.
    pub keep_prob: f64,
    /// Random isometry per sample per epoch.
    pub augment: bool,
    pub holdout_fraction: f64,
    /// Hidden widths; empty means the standard stack.
    pub hidden: Vec<usize>,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            batch_size: 256,
            learning_rate: 1e-4,
            keep_prob: 0.85,
            augment: true,
            holdout_fraction: 0.1,
            hidden: Vec::new(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epoch_losses: Vec<f64>,
    /// Held-out accuracy after each epoch.
    pub heldout_curve: Vec<f64>,
    pub train_size: usize,
    pub heldout_size: usize,
    pub heldout_accuracy: f64,
    /// Held-out predictions were all one class.
    pub degenerate: bool,
}

/// Deterministic shuffled split into `(train, heldout)` indices.
pub fn split_holdout(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(split_seed(seed)));
    let held = ((n as f64 * fraction).round() as usize).min(n.saturating_sub(1));
    let train = idx.split_off(held);
    (train, idx)
}

fn split_seed(seed: u64) -> u64 {
    seed ^ 0xA5A5_5A5A_C3C3_3C3C
}

/// Fraction of samples whose thresholded score matches the label.
pub fn accuracy(clf: &MlpClassifier, samples: &[&IntersectionSample]) -> f64 {
    predictions(clf, samples)
        .iter()
        .zip(samples)
        .filter(|(p, s)| (**p >= 0.5) == s.label)
        .count() as f64
        / samples.len().max(1) as f64
}

fn predictions(clf: &MlpClassifier, samples: &[&IntersectionSample]) -> Vec<f64> {
    let dim = clf.input_dim();
    let mut out = Vec::with_capacity(samples.len());
    for chunk in samples.chunks(512) {
        let x = Array2::from_shape_fn((chunk.len(), dim), |(r, c)| chunk[r].coords[c]);
        out.extend(clf.predict_batch(x.view()).iter());
    }
    out
}

/// Trains a scorer on `dataset` in single precision and returns it widened
/// to 64-bit weights, with accuracy on a held-out split.
pub fn mlp_train(dataset: &IntersectionDataset, config: &TrainConfig) -> Result<(MlpClassifier, TrainReport), IntersectError> {
    if dataset.samples.len() < 2 {
        return Err(IntersectError::EmptyDataset);
    }
    let dim = dataset.dim();
    let mut widths = standard_widths(dim);
    if !config.hidden.is_empty() {
        widths = std::iter::once(dim).chain(config.hidden.iter().copied()).chain([1]).collect();
    }
    let mut net: Mlp<f32> = Mlp::new(&widths, config.seed);
    let adam_cfg = AdamConfig {
        learning_rate: config.learning_rate,
        ..AdamConfig::default()
    };
    let mut opt: Vec<(Adam<f32>, Adam<f32>)> = net
        .layers
        .iter()
        .map(|l| (Adam::new(adam_cfg, l.weight.len()), Adam::new(adam_cfg, l.bias.len())))
        .collect();

    let (mut train, held) = split_holdout(dataset.samples.len(), config.holdout_fraction, config.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
    let batch = config.batch_size.max(1);
    let held_samples: Vec<&IntersectionSample> = held.iter().map(|&i| &dataset.samples[i]).collect();
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut heldout_curve = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        train.shuffle(&mut rng);
        let mut total = 0.0;
        for idx in train.chunks(batch) {
            let mut x = Array2::<f32>::zeros((idx.len(), dim));
            let mut labels = Vec::with_capacity(idx.len());
            for (r, &i) in idx.iter().enumerate() {
                let s = &dataset.samples[i];
                let coords = if config.augment {
                    Isometry::random(dataset.kind, &mut rng).apply(&s.coords)
                } else {
                    s.coords.clone()
                };
                for (c, v) in coords.iter().enumerate() {
                    x[[r, c]] = *v as f32;
                }
                labels.push(if s.label { 1.0 } else { 0.0 });
            }
            let g = net.batch_gradients(x.view(), &labels, config.keep_prob, &mut rng);
            if !g.loss.is_finite() {
                return Err(IntersectError::Diverged { epoch });
            }
            total += g.loss as f64 * idx.len() as f64;
            for ((layer, grad), (ow, ob)) in net.layers.iter_mut().zip(&g.layers).zip(&mut opt) {
                ow.step(layer.weight.as_slice_mut().unwrap(), grad.weight.as_standard_layout().as_slice().unwrap());
                ob.step(layer.bias.as_slice_mut().unwrap(), grad.bias.as_standard_layout().as_slice().unwrap());
            }
        }
        let mean = total / train.len() as f64;
        let acc = accuracy(&net.cast(), &held_samples);
        log::info!("epoch {epoch}: loss {mean:.5}, held-out accuracy {acc:.4}");
        epoch_losses.push(mean);
        heldout_curve.push(acc);
    }

    let clf: MlpClassifier = net.cast();
    let preds = predictions(&clf, &held_samples);
    let positives = preds.iter().filter(|p| **p >= 0.5).count();
    let heldout_accuracy = preds
        .iter()
        .zip(&held_samples)
        .filter(|(p, s)| (**p >= 0.5) == s.label)
        .count() as f64
        / held_samples.len().max(1) as f64;
    let degenerate = !held_samples.is_empty() && (positives == 0 || positives == held_samples.len());
    if degenerate {
        log::warn!("classifier predicts a single class on the held-out split");
    }
    Ok((
        clf,
        TrainReport {
            epoch_losses,
            heldout_curve,
            train_size: train.len(),
            heldout_size: held.len(),
            heldout_accuracy,
            degenerate,
        },
    ))
}
