use std::fmt::Debug;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView2, Axis, LinalgScalar, ScalarOperand};
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::IntersectError;

/// Hidden-layer widths of the intersection scorers.
pub const HIDDEN_WIDTHS: [usize; 6] = [1024, 1024, 1024, 512, 256, 128];

const MAGIC: &[u8; 4] = b"CXML";

/// `[input, 1024, 1024, 1024, 512, 256, 128, 1]`.
pub fn standard_widths(input: usize) -> Vec<usize> {
    let mut w = vec![input];
    w.extend_from_slice(&HIDDEN_WIDTHS);
    w.push(1);
    w
}

pub trait Scalar: LinalgScalar + Float + ScalarOperand + Send + Sync + Debug + 'static {}
impl Scalar for f32 {}
impl Scalar for f64 {}

#[derive(Clone, Debug, PartialEq)]
pub struct Layer<F> {
    /// `(inputs, outputs)`
    pub weight: Array2<F>,
    pub bias: Array1<F>,
}

/// Fully connected network: rectifier on hidden layers, one logistic
/// output unit.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp<F> {
    pub layers: Vec<Layer<F>>,
}

/// Inference-side scorer with 64-bit weights.
pub type MlpClassifier = Mlp<f64>;

pub(crate) struct Gradients<F> {
    pub layers: Vec<Layer<F>>,
    pub loss: F,
}

#[inline]
fn sigmoid<F: Float>(z: F) -> F {
    if z >= F::zero() {
        F::one() / (F::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (F::one() + e)
    }
}

/// `log(1 + exp(z)) - y z`, the cross-entropy of a logit against label `y`.
#[inline]
fn bce_with_logit<F: Float>(z: F, y: F) -> F {
    z.max(F::zero()) - y * z + (F::one() + (-z.abs()).exp()).ln()
}

impl<F: Scalar> Mlp<F> {
    /// He-uniform initialized network with the given layer widths.
    pub fn new(widths: &[usize], seed: u64) -> Self {
        assert!(widths.len() >= 2 && *widths.last().unwrap() == 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let layers = widths
            .windows(2)
            .map(|w| {
                let bound = (6.0 / w[0] as f64).sqrt();
                let weight = Array2::from_shape_fn((w[0], w[1]), |_| {
                    F::from(rng.random_range(-bound..bound)).unwrap()
                });
                Layer {
                    weight,
                    bias: Array1::zeros(w[1]),
                }
            })
            .collect();
        Mlp { layers }
    }

    pub fn widths(&self) -> Vec<usize> {
        let mut w = vec![self.input_dim()];
        w.extend(self.layers.iter().map(|l| l.bias.len()));
        w
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weight.nrows()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    pub fn cast<G: Scalar>(&self) -> Mlp<G> {
        Mlp {
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    weight: l.weight.mapv(|x| G::from(x).unwrap()),
                    bias: l.bias.mapv(|x| G::from(x).unwrap()),
                })
                .collect(),
        }
    }

    /// Output logits for a batch of rows (no dropout).
    pub fn logits(&self, x: ArrayView2<F>) -> Array1<F> {
        let mut h = x.to_owned();
        let last = self.layers.len() - 1;
        for (k, layer) in self.layers.iter().enumerate() {
            h = h.dot(&layer.weight) + &layer.bias;
            if k < last {
                h.mapv_inplace(|v| v.max(F::zero()));
            }
        }
        h.index_axis_move(Axis(1), 0)
    }

    /// Scores in `[0, 1]` for a batch of rows.
    pub fn predict_batch(&self, x: ArrayView2<F>) -> Array1<F> {
        self.logits(x).mapv(sigmoid)
    }

    /// Mean cross-entropy and its parameter gradients on one batch, with
    /// inverted dropout (keep probability `keep`) after every hidden layer.
    pub(crate) fn batch_gradients(
        &self,
        x: ArrayView2<F>,
        labels: &[F],
        keep: f64,
        rng: &mut impl Rng,
    ) -> Gradients<F> {
        let batch = x.nrows();
        let last = self.layers.len() - 1;
        let scale = F::from(1.0 / keep).unwrap();
        let mut inputs: Vec<Array2<F>> = Vec::with_capacity(self.layers.len());
        let mut factors: Vec<Array2<F>> = Vec::with_capacity(last);
        let mut h = x.to_owned();
        for (k, layer) in self.layers.iter().enumerate() {
            let z = h.dot(&layer.weight) + &layer.bias;
            inputs.push(std::mem::replace(&mut h, z));
            if k < last {
                let mut factor = Array2::zeros(h.raw_dim());
                ndarray::Zip::from(&mut h).and(&mut factor).for_each(|v, f| {
                    let kept = keep >= 1.0 || rng.random::<f64>() < keep;
                    if *v > F::zero() && kept {
                        *f = scale;
                        *v = *v * scale;
                    } else {
                        *v = F::zero();
                    }
                });
                factors.push(factor);
            }
        }
        let inv_b = F::from(1.0 / batch as f64).unwrap();
        let mut loss = F::zero();
        let mut delta = Array2::zeros((batch, 1));
        for r in 0..batch {
            let z = h[[r, 0]];
            loss = loss + bce_with_logit(z, labels[r]);
            delta[[r, 0]] = (sigmoid(z) - labels[r]) * inv_b;
        }
        let mut grads: Vec<Layer<F>> = Vec::with_capacity(self.layers.len());
        for k in (0..self.layers.len()).rev() {
            let weight = inputs[k].t().dot(&delta);
            let bias = delta.sum_axis(Axis(0));
            grads.push(Layer { weight, bias });
            if k > 0 {
                let mut d = delta.dot(&self.layers[k].weight.t());
                ndarray::Zip::from(&mut d).and(&factors[k - 1]).for_each(|a, &f| *a = *a * f);
                delta = d;
            }
        }
        grads.reverse();
        Gradients {
            layers: grads,
            loss: loss * inv_b,
        }
    }
}

impl MlpClassifier {
    fn check_dim(&self, coords: &[f64]) -> Result<(), IntersectError> {
        if coords.len() != self.input_dim() {
            return Err(IntersectError::Dimension {
                expected: self.input_dim(),
                got: coords.len(),
            });
        }
        Ok(())
    }

    /// Score of one pre-normalized input row.
    pub fn predict(&self, coords: &[f64]) -> Result<f64, IntersectError> {
        self.check_dim(coords)?;
        let x = ArrayView2::from_shape((1, coords.len()), coords).expect("row shape");
        Ok(self.predict_batch(x)[0])
    }

    /// Score and its exact gradient with respect to the input row.
    pub fn predict_with_gradient(&self, coords: &[f64]) -> Result<(f64, Vec<f64>), IntersectError> {
        self.check_dim(coords)?;
        let last = self.layers.len() - 1;
        let mut h = Array1::from(coords.to_vec());
        let mut active: Vec<Array1<bool>> = Vec::with_capacity(last);
        for (k, layer) in self.layers.iter().enumerate() {
            h = h.dot(&layer.weight) + &layer.bias;
            if k < last {
                active.push(h.mapv(|v| v > 0.0));
                h.mapv_inplace(|v| v.max(0.0));
            }
        }
        let score = sigmoid(h[0]);
        let mut delta = Array1::from(vec![score * (1.0 - score)]);
        for k in (0..self.layers.len()).rev() {
            delta = self.layers[k].weight.dot(&delta);
            if k > 0 {
                ndarray::Zip::from(&mut delta)
                    .and(&active[k - 1])
                    .for_each(|d, &a| {
                        if !a {
                            *d = 0.0;
                        }
                    });
            }
        }
        Ok((score, delta.to_vec()))
    }

    /// Binary layout: `"CXML"`, u32 layer count `L`, `L + 1` u32 widths,
    /// then per layer the `(in, out)` weight matrix row-major followed by
    /// the biases, all little-endian f64.
    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.layers.len() as u32).to_le_bytes())?;
        for width in self.widths() {
            w.write_all(&(width as u32).to_le_bytes())?;
        }
        for layer in &self.layers {
            for &x in layer.weight.iter() {
                w.write_all(&x.to_le_bytes())?;
            }
            for &x in layer.bias.iter() {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self, IntersectError> {
        let bad = |m: &str| IntersectError::Format(m.to_string());
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("not a classifier file (bad magic)"));
        }
        let mut word = [0u8; 4];
        let mut read_u32 = |r: &mut dyn Read| -> std::io::Result<u32> {
            r.read_exact(&mut word)?;
            Ok(u32::from_le_bytes(word))
        };
        let count = read_u32(r)? as usize;
        if count == 0 || count > 64 {
            return Err(bad("implausible layer count"));
        }
        let widths: Vec<usize> = (0..=count)
            .map(|_| read_u32(r).map(|w| w as usize))
            .collect::<Result<_, _>>()?;
        if widths.iter().any(|&w| w == 0 || w > 1 << 16) || widths[count] != 1 {
            return Err(bad("implausible layer widths"));
        }
        let read_f64s = |r: &mut dyn Read, n: usize| -> std::io::Result<Vec<f64>> {
            let mut buf = vec![0u8; n * 8];
            r.read_exact(&mut buf)?;
            Ok(buf
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect())
        };
        let mut layers = Vec::with_capacity(count);
        for w in widths.windows(2) {
            let weight = Array2::from_shape_vec((w[0], w[1]), read_f64s(r, w[0] * w[1])?)
                .map_err(|e| bad(&e.to_string()))?;
            let bias = Array1::from(read_f64s(r, w[1])?);
            layers.push(Layer { weight, bias });
        }
        Ok(Mlp { layers })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), IntersectError> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IntersectError> {
        let mut r = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(seed: u64) -> MlpClassifier {
        let mut m = MlpClassifier::new(&[6, 16, 8, 1], seed);
        // non-zero biases so some units sit in each regime
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
        for l in &mut m.layers {
            l.bias.mapv_inplace(|_| rng.random_range(-0.3..0.3));
        }
        m
    }

    #[test]
    fn standard_architecture() {
        let m = MlpClassifier::new(&standard_widths(36), 0);
        assert_eq!(m.widths(), vec![36, 1024, 1024, 1024, 512, 256, 128, 1]);
        assert_eq!(MlpClassifier::new(&standard_widths(72), 0).input_dim(), 72);
    }

    #[test]
    fn score_in_unit_interval() {
        let m = tiny(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let x: Vec<f64> = (0..6).map(|_| rng.random_range(-50.0..50.0)).collect();
            let p = m.predict(&x).unwrap();
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn dimension_mismatch() {
        let m = tiny(0);
        assert!(matches!(
            m.predict(&[0.0; 5]),
            Err(IntersectError::Dimension { expected: 6, got: 5 })
        ));
        assert!(m.predict_with_gradient(&[0.0; 7]).is_err());
    }

    #[test]
    fn input_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for seed in 0..10 {
            let m = tiny(seed);
            let x: Vec<f64> = (0..6).map(|_| rng.random()).collect();
            let (p, g) = m.predict_with_gradient(&x).unwrap();
            assert!((p - m.predict(&x).unwrap()).abs() < 1e-14);
            let h = 1e-6;
            for k in 0..6 {
                let mut a = x.clone();
                let mut b = x.clone();
                a[k] += h;
                b[k] -= h;
                let fd = (m.predict(&a).unwrap() - m.predict(&b).unwrap()) / (2.0 * h);
                let err = (fd - g[k]).abs();
                assert!(err <= 1e-4 * g[k].abs().max(1e-8) || err < 1e-9, "{fd} vs {}", g[k]);
            }
        }
    }

    #[test]
    fn parameter_gradients_match_finite_differences() {
        let m = tiny(5).cast::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = Array2::from_shape_fn((4, 6), |_| rng.random::<f64>());
        let y = [1.0, 0.0, 1.0, 0.0];
        let g = m.batch_gradients(x.view(), &y, 1.0, &mut rng);
        let loss = |m: &MlpClassifier| {
            let z = m.logits(x.view());
            z.iter().zip(&y).map(|(&z, &y)| bce_with_logit(z, y)).sum::<f64>() / 4.0
        };
        assert!((loss(&m) - g.loss).abs() < 1e-12);
        let h = 1e-6;
        for (l, (i, j)) in [(0, (2, 3)), (1, (5, 1)), (2, (7, 0))] {
            let mut a = m.clone();
            let mut b = m.clone();
            a.layers[l].weight[[i, j]] += h;
            b.layers[l].weight[[i, j]] -= h;
            let fd = (loss(&a) - loss(&b)) / (2.0 * h);
            assert!((fd - g.layers[l].weight[[i, j]]).abs() < 1e-7, "{fd}");
            let mut a = m.clone();
            let mut b = m.clone();
            a.layers[l].bias[j] += h;
            b.layers[l].bias[j] -= h;
            let fd = (loss(&a) - loss(&b)) / (2.0 * h);
            assert!((fd - g.layers[l].bias[j]).abs() < 1e-7);
        }
    }

    #[test]
    fn file_round_trip() {
        let m = tiny(7);
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"CXML");
        assert_eq!(buf.len(), 4 + 4 + 4 * 4 + 8 * m.param_count());
        let back = MlpClassifier::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, m);
        assert!(MlpClassifier::read_from(&mut &b"XXXX"[..]).is_err());
        assert!(MlpClassifier::read_from(&mut &buf[..buf.len() - 1]).is_err());
    }
}
