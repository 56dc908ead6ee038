use crate::mesh::TriangleMesh;

use super::coons::CoonsPatch;
use crate::vec3::Vec3;

/// Vertex index of grid node `(i, j)` in a tessellation of resolution `n`;
/// `i` runs along `s`, `j` along `t`.
#[inline]
pub fn grid_index(n: usize, i: usize, j: usize) -> usize {
    j * (n + 1) + i
}

/// `patch` evaluated on the `(n+1) x (n+1)` parameter grid, indexed by
/// [`grid_index`]. Boundary curves are evaluated once per row and column.
pub fn grid_points(patch: &CoonsPatch, n: usize) -> Vec<Vec3> {
    let [c1, c2, c3, c4] = [0, 1, 2, 3].map(|k| patch.curve(k));
    let param = |k: usize| k as f64 / n as f64;
    let bottom: Vec<Vec3> = (0..=n).map(|i| c1.eval_unchecked(param(i))).collect();
    let top: Vec<Vec3> = (0..=n).map(|i| c3.eval_unchecked(1.0 - param(i))).collect();
    let right: Vec<Vec3> = (0..=n).map(|j| c2.eval_unchecked(param(j))).collect();
    let left: Vec<Vec3> = (0..=n).map(|j| c4.eval_unchecked(1.0 - param(j))).collect();
    let corners = [(0, 0), (n, 0), (n, n), (0, n)];
    let mut out = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        let t = param(j);
        for i in 0..=n {
            let s = param(i);
            if let Some(k) = corners.iter().position(|&c| c == (i, j)) {
                out.push(patch.control[3 * k]);
                continue;
            }
            let ruled = bottom[i] * (1.0 - t) + top[i] * t + right[j] * s + left[j] * (1.0 - s);
            let bilinear = c1.p[0] * ((1.0 - s) * (1.0 - t))
                + c1.p[3] * (s * (1.0 - t))
                + c3.p[3] * ((1.0 - s) * t)
                + c3.p[0] * (s * t);
            out.push(ruled - bilinear);
        }
    }
    out
}

/// Uniform `n x n` parameter-grid tessellation: `(n+1)^2` vertices and
/// `2n^2` triangles wound so their normals agree with `P_s x P_t`.
///
/// # Panics
/// If `n == 0`.
pub fn tessellate(patch: &CoonsPatch, n: usize) -> TriangleMesh {
    assert!(n >= 1, "tessellation resolution must be at least 1");
    let vertices = grid_points(patch, n);
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let v00 = grid_index(n, i, j);
            let v10 = grid_index(n, i + 1, j);
            let v11 = grid_index(n, i + 1, j + 1);
            let v01 = grid_index(n, i, j + 1);
            faces.push([v00, v10, v11]);
            faces.push([v00, v11, v01]);
        }
    }
    TriangleMesh::from_parts_unchecked(vertices, faces)
}
