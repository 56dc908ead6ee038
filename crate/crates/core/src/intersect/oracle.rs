//! Tessellation-based intersection oracle for Coons patches.

use std::collections::HashSet;
use std::ops::ControlFlow;

use crate::geom::{grid_index, tessellate, CoonsPatch};
use crate::template::PatchTopology;
use crate::vec3::{Aabb, Vec3};

use super::tri_tri::{triangles_intersect, PlaneFilter};

/// Tessellated patch with a bounding-box hierarchy over rectangles of grid
/// cells. Leaves are single cells holding two triangles.
struct CellTree {
    n: usize,
    tris: Vec<[Vec3; 3]>,
    faces: Vec<[usize; 3]>,
    planes: Vec<PlaneFilter>,
    nodes: Vec<Node>,
}

struct Node {
    bounds: Aabb,
    /// cell range `[i0, i1) x [j0, j1)`
    cells: [usize; 4],
    children: Option<[usize; 2]>,
}

impl CellTree {
    fn new(patch: &CoonsPatch, n: usize) -> Self {
        let mesh = tessellate(patch, n);
        let tris: Vec<[Vec3; 3]> = (0..mesh.faces.len()).map(|f| mesh.triangle(f)).collect();
        let mut tree = CellTree {
            n,
            planes: tris.iter().map(PlaneFilter::new).collect(),
            tris,
            faces: mesh.faces,
            nodes: Vec::with_capacity(4 * n * n),
        };
        tree.build([0, n, 0, n]);
        tree
    }

    fn build(&mut self, cells: [usize; 4]) -> usize {
        let [i0, i1, j0, j1] = cells;
        let id = self.nodes.len();
        self.nodes.push(Node {
            bounds: Aabb {
                min: Vec3::splat(f64::INFINITY),
                max: Vec3::splat(f64::NEG_INFINITY),
            },
            cells,
            children: None,
        });
        let bounds = if i1 - i0 == 1 && j1 - j0 == 1 {
            let f = 2 * (j0 * self.n + i0);
            Aabb::from_points(self.tris[f].iter().chain(&self.tris[f + 1])).unwrap()
        } else {
            let halves = if i1 - i0 >= j1 - j0 {
                let m = (i0 + i1) / 2;
                [[i0, m, j0, j1], [m, i1, j0, j1]]
            } else {
                let m = (j0 + j1) / 2;
                [[i0, i1, j0, m], [i0, i1, m, j1]]
            };
            let a = self.build(halves[0]);
            let b = self.build(halves[1]);
            self.nodes[id].children = Some([a, b]);
            let (ba, bb) = (self.nodes[a].bounds, self.nodes[b].bounds);
            Aabb {
                min: ba.min.min(bb.min),
                max: ba.max.max(bb.max),
            }
        };
        self.nodes[id].bounds = bounds;
        id
    }

    fn leaf_faces(&self, node: usize) -> [usize; 2] {
        let [i0, _, j0, _] = self.nodes[node].cells;
        let f = 2 * (j0 * self.n + i0);
        [f, f + 1]
    }

    /// Exact test of face `f` against face `g` of `other`.
    fn faces_meet(&self, f: usize, other: &CellTree, g: usize) -> bool {
        if self.planes[f].separates(&other.tris[g]) || other.planes[g].separates(&self.tris[f]) {
            return false;
        }
        triangles_intersect(&self.tris[f], &other.tris[g])
    }

    fn extent(&self, node: usize) -> usize {
        let [i0, i1, j0, j1] = self.nodes[node].cells;
        (i1 - i0) * (j1 - j0)
    }
}

/// Visits every pair of faces, one from each tree, whose leaf boxes
/// overlap.
fn traverse(
    a: &CellTree,
    na: usize,
    b: &CellTree,
    nb: usize,
    visit: &mut impl FnMut(usize, usize) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if !a.nodes[na].bounds.overlaps(&b.nodes[nb].bounds) {
        return ControlFlow::Continue(());
    }
    match (a.nodes[na].children, b.nodes[nb].children) {
        (None, None) => {
            for fa in a.leaf_faces(na) {
                for fb in b.leaf_faces(nb) {
                    visit(fa, fb)?;
                }
            }
            ControlFlow::Continue(())
        }
        (Some([c0, c1]), None) => {
            traverse(a, c0, b, nb, visit)?;
            traverse(a, c1, b, nb, visit)
        }
        (None, Some([c0, c1])) => {
            traverse(a, na, b, c0, visit)?;
            traverse(a, na, b, c1, visit)
        }
        (Some([a0, a1]), Some([b0, b1])) => {
            if a.extent(na) >= b.extent(nb) {
                traverse(a, a0, b, nb, visit)?;
                traverse(a, a1, b, nb, visit)
            } else {
                traverse(a, na, b, b0, visit)?;
                traverse(a, na, b, b1, visit)
            }
        }
    }
}

/// Visits every unordered pair of distinct faces of one tree whose leaf
/// boxes overlap.
fn traverse_self(t: &CellTree, node: usize, visit: &mut impl FnMut(usize, usize) -> ControlFlow<()>) -> ControlFlow<()> {
    match t.nodes[node].children {
        None => {
            let [f0, f1] = t.leaf_faces(node);
            visit(f0, f1)
        }
        Some([c0, c1]) => {
            traverse_self(t, c0, visit)?;
            traverse_self(t, c1, visit)?;
            traverse(t, c0, t, c1, visit)
        }
    }
}

fn share_vertex(a: &[usize; 3], b: &[usize; 3]) -> bool {
    a.iter().any(|v| b.contains(v))
}

fn self_pairs(patch: &CoonsPatch, n: usize, mut on_hit: impl FnMut() -> ControlFlow<()>) {
    let tree = CellTree::new(patch, n);
    let _ = traverse_self(&tree, 0, &mut |i, j| {
        if !share_vertex(&tree.faces[i], &tree.faces[j]) && tree.faces_meet(i, &tree, j) {
            on_hit()
        } else {
            ControlFlow::Continue(())
        }
    });
}

/// Whether two triangles of the `n x n` tessellation that share no vertex
/// intersect.
///
/// # Panics
/// If `n < 1`.
pub fn patch_self_intersects(patch: &CoonsPatch, n: usize) -> bool {
    let mut hit = false;
    self_pairs(patch, n, || {
        hit = true;
        ControlFlow::Break(())
    });
    hit
}

/// Number of intersecting vertex-disjoint triangle pairs in the
/// tessellation; a rough severity measure.
pub fn count_self_intersections(patch: &CoonsPatch, n: usize) -> usize {
    let mut count = 0;
    self_pairs(patch, n, || {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}

/// Grid vertices of each patch that lie on boundary shared between two
/// template patches. Triangle pairs that both touch such vertices are not
/// tested, since glued seams always touch.
#[derive(Clone, Debug, Default)]
pub struct SeamExemption {
    pub a: HashSet<usize>,
    pub b: HashSet<usize>,
}

impl SeamExemption {
    pub fn none() -> Self {
        SeamExemption::default()
    }

    /// Exemption derived from the point indices two patches share.
    pub fn between(ta: &PatchTopology, tb: &PatchTopology, n: usize) -> Self {
        let shared: HashSet<usize> = ta.indices.iter().filter(|i| tb.indices.contains(i)).copied().collect();
        SeamExemption {
            a: seam_vertices(ta, &shared, n),
            b: seam_vertices(tb, &shared, n),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty() && self.b.is_empty()
    }
}

/// Grid nodes of boundary curve `k` at resolution `n`.
fn boundary_nodes(k: usize, n: usize) -> Vec<usize> {
    (0..=n)
        .map(|m| match k {
            0 => grid_index(n, m, 0),
            1 => grid_index(n, n, m),
            2 => grid_index(n, m, n),
            _ => grid_index(n, 0, m),
        })
        .collect()
}

fn seam_vertices(t: &PatchTopology, shared: &HashSet<usize>, n: usize) -> HashSet<usize> {
    let mut out = HashSet::new();
    let corners = [grid_index(n, 0, 0), grid_index(n, n, 0), grid_index(n, n, n), grid_index(n, 0, n)];
    for k in 0..4 {
        if shared.contains(&t.corner(k)) {
            out.insert(corners[k]);
        }
        if t.curve(k).iter().all(|i| shared.contains(i)) {
            out.extend(boundary_nodes(k, n));
        }
    }
    out
}

/// Whether any triangle of `a`'s tessellation meets any triangle of `b`'s.
pub fn patches_intersect(a: &CoonsPatch, b: &CoonsPatch, n: usize) -> bool {
    patches_intersect_with_seams(a, b, n, &SeamExemption::none())
}

pub fn patches_intersect_with_seams(a: &CoonsPatch, b: &CoonsPatch, n: usize, seams: &SeamExemption) -> bool {
    let ta = CellTree::new(a, n);
    let tb = CellTree::new(b, n);
    let touches = |face: &[usize; 3], set: &HashSet<usize>| face.iter().any(|v| set.contains(v));
    traverse(&ta, 0, &tb, 0, &mut |fa, fb| {
        if !seams.is_empty() && touches(&ta.faces[fa], &seams.a) && touches(&tb.faces[fb], &seams.b) {
            return ControlFlow::Continue(());
        }
        if ta.faces_meet(fa, &tb, fb) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .is_break()
}
