use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::vec3::Vec3;

use super::{MeshError, TriangleMesh};

/// A surface point together with its unit normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSample {
    pub position: Vec3,
    pub normal: Vec3,
}

/// Draws `n` points uniformly by area from the non-degenerate faces of
/// `mesh`, each carrying its face's normal.
pub fn sample_surface(mesh: &TriangleMesh, n: usize, seed: u64) -> Result<Vec<SurfaceSample>, MeshError> {
    let threshold = mesh.degenerate_area_threshold();
    let mut faces = Vec::new();
    let mut cumulative = Vec::new();
    let mut total = 0.0;
    for f in 0..mesh.faces.len() {
        let area = mesh.face_area(f);
        let Some(normal) = mesh.face_normal(f) else {
            continue;
        };
        if area < threshold || area == 0.0 {
            continue;
        }
        total += area;
        faces.push((f, normal));
        cumulative.push(total);
    }
    if faces.is_empty() {
        return Err(MeshError::AllDegenerate);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..n)
        .map(|_| {
            let r = rng.random::<f64>() * total;
            let k = cumulative.partition_point(|&c| c <= r).min(faces.len() - 1);
            let (f, normal) = faces[k];
            let [a, b, c] = mesh.triangle(f);
            let su = rng.random::<f64>().sqrt();
            let v: f64 = rng.random();
            SurfaceSample {
                position: a * (1.0 - su) + b * (su * (1.0 - v)) + c * (su * v),
                normal,
            }
        })
        .collect();
    Ok(samples)
}
