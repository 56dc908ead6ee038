use rand::Rng;
use rand_distr::StandardNormal;

use crate::vec3::{Mat3, Vec3};

use super::normalize::UnitCubeFrame;
use super::SampleKind;

/// Reparameterization of one patch by a symmetry of the parameter square:
/// rotate the 12-point loop by `3 * quarter_turns` slots, optionally
/// reversing it first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SquareSymmetry {
    pub quarter_turns: u8,
    pub reverse: bool,
}

impl SquareSymmetry {
    /// Source slot for destination slot `k`.
    pub fn source(&self, k: usize) -> usize {
        let k = if self.reverse { (12 - k) % 12 } else { k };
        (k + 3 * self.quarter_turns as usize) % 12
    }

    pub fn random(rng: &mut impl Rng) -> Self {
        SquareSymmetry {
            quarter_turns: rng.random_range(0..4),
            reverse: rng.random(),
        }
    }
}

/// Label-preserving transformation of an intersection sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Isometry {
    pub rotation: Mat3,
    pub reflect: bool,
    pub symmetries: [SquareSymmetry; 2],
    pub swap: bool,
}

impl Isometry {
    pub fn identity() -> Self {
        Isometry {
            rotation: Mat3::IDENTITY,
            reflect: false,
            symmetries: [SquareSymmetry::default(); 2],
            swap: false,
        }
    }

    /// Uniform rotation, fair-coin reflection, uniform square symmetry per
    /// patch, and a fair-coin patch swap for pairs.
    pub fn random(kind: SampleKind, rng: &mut impl Rng) -> Self {
        let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        Isometry {
            rotation: Mat3::from_quaternion(q[0] / n, q[1] / n, q[2] / n, q[3] / n),
            reflect: rng.random(),
            symmetries: [SquareSymmetry::random(rng), SquareSymmetry::random(rng)],
            swap: kind == SampleKind::Pair && rng.random(),
        }
    }

    /// Transforms flat coordinates (12 or 24 points) and renormalizes them
    /// into the unit cube.
    pub fn apply(&self, coords: &[f64]) -> Vec<f64> {
        let pts: Vec<Vec3> = coords.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect();
        let patches = pts.len() / 12;
        let mut out = Vec::with_capacity(pts.len());
        for p in 0..patches {
            let src_patch = if self.swap { patches - 1 - p } else { p };
            let sym = self.symmetries[p.min(1)];
            for k in 0..12 {
                let mut v = pts[src_patch * 12 + sym.source(k)] - Vec3::splat(0.5);
                if self.reflect {
                    v.x = -v.x;
                }
                out.push(self.rotation * v);
            }
        }
        UnitCubeFrame::of(&out).flatten(&out)
    }
}

/// Applies a random isometry derived from `seed`.
pub fn augment_isometry(kind: SampleKind, coords: &[f64], seed: u64) -> Vec<f64> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Isometry::random(kind, &mut rng).apply(coords)
}
