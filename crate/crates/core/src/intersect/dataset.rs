use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geom::CoonsPatch;
use crate::vec3::Vec3;

use super::normalize::UnitCubeFrame;
use super::oracle::{patch_self_intersects, patches_intersect};
use super::{IntersectError, SampleKind};

const MAGIC: &[u8; 4] = b"CXDS";
const VERSION: u32 = 1;

/// Tessellation resolution used to label generated samples.
pub const LABEL_RESOLUTION: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionSample {
    /// 36 or 72 coordinates in the unit cube.
    pub coords: Vec<f64>,
    pub label: bool,
}

/// Counts from the rejection sampler before class balancing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DrawStats {
    pub draws: u64,
    pub positives: u64,
}

impl DrawStats {
    /// Fraction of raw draws the oracle labelled as intersecting.
    pub fn raw_positive_rate(&self) -> f64 {
        self.positives as f64 / self.draws.max(1) as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionDataset {
    pub kind: SampleKind,
    pub samples: Vec<IntersectionSample>,
    pub stats: DrawStats,
}

pub fn coords_to_points(coords: &[f64]) -> Vec<Vec3> {
    coords.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect()
}

pub fn patches_from_coords(coords: &[f64]) -> Vec<CoonsPatch> {
    coords_to_points(coords)
        .chunks_exact(12)
        .map(|c| CoonsPatch::new(c.try_into().unwrap()))
        .collect()
}

/// Oracle label of flat coordinates at tessellation resolution `n`.
pub fn label_coords(kind: SampleKind, coords: &[f64], n: usize) -> bool {
    let patches = patches_from_coords(coords);
    match kind {
        SampleKind::SelfIntersection => patch_self_intersects(&patches[0], n),
        SampleKind::Pair => patches_intersect(&patches[0], &patches[1], n),
    }
}

/// Uniform control points in the unit cube, normalized and labelled.
pub fn random_sample(kind: SampleKind, rng: &mut impl Rng, n: usize) -> IntersectionSample {
    let pts: Vec<Vec3> = (0..kind.points())
        .map(|_| Vec3::new(rng.random(), rng.random(), rng.random()))
        .collect();
    let coords = UnitCubeFrame::of(&pts).flatten(&pts);
    let label = label_coords(kind, &coords, n);
    IntersectionSample { coords, label }
}

fn draw_seed(seed: u64, draw: u64) -> u64 {
    seed ^ draw.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Balanced dataset built by rejection: `count / 2` intersecting and
/// `count - count / 2` clean samples, in draw order. Draws are labelled in
/// parallel but accepted sequentially, so the result depends only on
/// `seed`.
pub fn generate_dataset(kind: SampleKind, count: usize, seed: u64) -> IntersectionDataset {
    generate_dataset_at(kind, count, seed, LABEL_RESOLUTION)
}

pub fn generate_dataset_at(kind: SampleKind, count: usize, seed: u64, resolution: usize) -> IntersectionDataset {
    let want_pos = count / 2;
    let want_neg = count - want_pos;
    let (mut pos, mut neg) = (0usize, 0usize);
    let mut samples = Vec::with_capacity(count);
    let mut stats = DrawStats::default();
    let chunk = 256u64;
    let mut next = 0u64;
    while pos < want_pos || neg < want_neg {
        let batch: Vec<IntersectionSample> = (next..next + chunk)
            .into_par_iter()
            .map(|d| {
                let mut rng = ChaCha8Rng::seed_from_u64(draw_seed(seed, d));
                random_sample(kind, &mut rng, resolution)
            })
            .collect();
        next += chunk;
        for s in batch {
            if pos >= want_pos && neg >= want_neg {
                break;
            }
            stats.draws += 1;
            stats.positives += s.label as u64;
            if s.label && pos < want_pos {
                pos += 1;
                samples.push(s);
            } else if !s.label && neg < want_neg {
                neg += 1;
                samples.push(s);
            }
        }
    }
    IntersectionDataset { kind, samples, stats }
}

impl IntersectionDataset {
    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn positive_fraction(&self) -> f64 {
        self.samples.iter().filter(|s| s.label).count() as f64 / self.samples.len().max(1) as f64
    }

    /// `"CXDS"`, u32 version, u8 kind, u64 count, u32 dim, then per
    /// record `dim` little-endian f64 and one label byte.
    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&[self.kind as u8])?;
        w.write_all(&(self.samples.len() as u64).to_le_bytes())?;
        w.write_all(&(self.dim() as u32).to_le_bytes())?;
        for s in &self.samples {
            for c in &s.coords {
                w.write_all(&c.to_le_bytes())?;
            }
            w.write_all(&[s.label as u8])?;
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read) -> Result<Self, IntersectError> {
        let bad = |m: String| IntersectError::Format(m);
        let mut head = [0u8; 4 + 4 + 1 + 8 + 4];
        r.read_exact(&mut head)?;
        if &head[..4] != MAGIC {
            return Err(bad("not a dataset file (bad magic)".into()));
        }
        let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
        if version != VERSION {
            return Err(bad(format!("unsupported dataset version {version}")));
        }
        let kind = SampleKind::from_code(head[8]).ok_or_else(|| bad(format!("unknown kind {}", head[8])))?;
        let count = u64::from_le_bytes(head[9..17].try_into().unwrap()) as usize;
        let dim = u32::from_le_bytes(head[17..21].try_into().unwrap()) as usize;
        if dim != kind.dim() {
            return Err(bad(format!("dimension {dim} does not match kind {kind:?}")));
        }
        let mut record = vec![0u8; dim * 8 + 1];
        let mut samples = Vec::with_capacity(count.min(1 << 24));
        for _ in 0..count {
            r.read_exact(&mut record)?;
            let coords = record[..dim * 8]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            let label = match record[dim * 8] {
                0 => false,
                1 => true,
                b => return Err(bad(format!("bad label byte {b}"))),
            };
            samples.push(IntersectionSample { coords, label });
        }
        Ok(IntersectionDataset {
            kind,
            samples,
            stats: DrawStats::default(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), IntersectError> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IntersectError> {
        Self::read_from(&mut std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
