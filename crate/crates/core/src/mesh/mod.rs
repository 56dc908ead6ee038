//! Triangle meshes: OBJ I/O, area-weighted surface sampling and exact
//! nearest-neighbour queries.

mod kdtree;
mod obj;
mod sample;

pub use kdtree::{KdTree, SpatialIndex};
pub use obj::{format_significant, load_obj, parse_obj, save_obj, write_obj};
pub use sample::{sample_surface, SurfaceSample};

use std::collections::HashMap;

use thiserror::Error;

use crate::vec3::{Aabb, Vec3};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("face {face} references vertex {index}, but the mesh has {count} vertices")]
    IndexOutOfRange { face: usize, index: usize, count: usize },
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("mesh has no non-degenerate faces")]
    AllDegenerate,
    #[error("nearest-neighbour index needs at least one point")]
    EmptyIndex,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Indexed triangle mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(MeshError::NonFinite(i));
        }
        for (f, face) in faces.iter().enumerate() {
            for &index in face {
                if index >= vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        face: f,
                        index,
                        count: vertices.len(),
                    });
                }
            }
        }
        Ok(TriangleMesh { vertices, faces })
    }

    pub(crate) fn from_parts_unchecked(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Self {
        TriangleMesh { vertices, faces }
    }

    #[inline]
    pub fn triangle(&self, f: usize) -> [Vec3; 3] {
        self.faces[f].map(|i| self.vertices[i])
    }

    /// Unnormalized normal with length twice the face area.
    #[inline]
    fn face_cross(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.triangle(f);
        (b - a).cross(c - a)
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_cross(f).norm()
    }

    pub fn face_normal(&self, f: usize) -> Option<Vec3> {
        self.face_cross(f).normalized()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    pub fn bounds(&self) -> Option<Aabb> {
        Aabb::from_points(&self.vertices)
    }

    /// Area below which a face counts as degenerate: `1e-12 * diag^2`.
    pub fn degenerate_area_threshold(&self) -> f64 {
        let d = self.bounds().map_or(0.0, |b| b.diagonal());
        1e-12 * d * d
    }

    pub fn is_degenerate(&self, f: usize) -> bool {
        self.face_area(f) < self.degenerate_area_threshold() || self.face_normal(f).is_none()
    }

    pub fn degenerate_faces(&self) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.is_degenerate(f)).collect()
    }

    /// Applies `f` to every vertex.
    pub fn map_vertices(&self, f: impl Fn(Vec3) -> Vec3) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            faces: self.faces.clone(),
        }
    }

    /// Undirected edge → number of incident faces.
    pub fn edge_face_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::new();
        for face in &self.faces {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    /// True when every edge is shared by exactly two faces and every
    /// directed edge appears once (consistent orientation).
    pub fn is_watertight(&self) -> bool {
        if self.faces.is_empty() {
            return false;
        }
        if !self.edge_face_counts().values().all(|&c| c == 2) {
            return false;
        }
        let mut directed = std::collections::HashSet::new();
        self.faces.iter().all(|face| {
            (0..3).all(|k| directed.insert((face[k], face[(k + 1) % 3])))
        })
    }

    /// Concatenates meshes without welding.
    /// Axis-aligned box with 12 outward-wound triangles.
    pub fn cuboid(min: Vec3, max: Vec3) -> TriangleMesh {
        let vertices = (0..8)
            .map(|b| {
                Vec3::new(
                    if b & 1 == 0 { min.x } else { max.x },
                    if b & 2 == 0 { min.y } else { max.y },
                    if b & 4 == 0 { min.z } else { max.z },
                )
            })
            .collect();
        let quads = [
            [0, 2, 3, 1],
            [4, 5, 7, 6],
            [0, 1, 5, 4],
            [2, 6, 7, 3],
            [0, 4, 6, 2],
            [1, 3, 7, 5],
        ];
        let faces = quads.iter().flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]]).collect();
        TriangleMesh::from_parts_unchecked(vertices, faces)
    }

    pub fn merge(meshes: &[TriangleMesh]) -> TriangleMesh {
        let mut out = TriangleMesh {
            vertices: Vec::new(),
            faces: Vec::new(),
        };
        for m in meshes {
            let base = out.vertices.len();
            out.vertices.extend_from_slice(&m.vertices);
            out.faces
                .extend(m.faces.iter().map(|f| f.map(|i| i + base)));
        }
        out
    }
}
