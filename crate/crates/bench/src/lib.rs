//! Shared fixtures for the benchmarks.

use coonsfit::mesh::{sample_surface, SurfaceSample};
use coonsfit::{build_cube_template, CoonsPatch, PatchCollection, SpatialIndex, TriangleMesh, Vec3};

/// Rest-pose cube with a mild deformation so no sample sits exactly on
/// the target.
pub fn deformed_cube() -> PatchCollection {
    build_cube_template(1.0)
        .rest_pose()
        .map_points(|p| Vec3::new(p.x * 1.05, p.y + 0.05 * p.x, p.z * (1.0 + 0.1 * p.y)))
}

pub fn cube_target(pool: usize, subset: usize) -> (SpatialIndex, Vec<SurfaceSample>) {
    let mesh = TriangleMesh::cuboid(Vec3::splat(-0.5), Vec3::splat(0.5));
    let index = SpatialIndex::build(sample_surface(&mesh, pool, 1).expect("valid mesh")).expect("non-empty pool");
    let samples = sample_surface(&mesh, subset, 2).expect("valid mesh");
    (index, samples)
}

/// Deterministic pseudo-random patch inside the unit cube.
pub fn scrambled_patch(seed: u64) -> CoonsPatch {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    CoonsPatch::new(std::array::from_fn(|_| Vec3::new(next(), next(), next())))
}
