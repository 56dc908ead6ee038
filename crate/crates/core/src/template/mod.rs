//! Deformable templates: shared control points plus patch topology.
//!
//! A patch is a loop of twelve point indices (see [`CoonsPatch`]); two
//! patches are glued along a boundary curve by listing the same four
//! indices in opposite order. Seams are therefore closed by construction
//! for any coordinates assigned to the points.

mod cube;
mod io;

pub use cube::build_cube_template;
pub use io::{load_template, parse_template, save_template, template_to_string};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::geom::{grid_index, grid_points, CoonsPatch};
use crate::mesh::TriangleMesh;
use crate::vec3::{Aabb, Vec3};

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("template file: {0}")]
    Schema(String),
    #[error("invalid template topology: {0}")]
    Topology(ValidationReport),
    #[error("expected {expected} control points, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Twelve point indices describing one patch's boundary loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PatchTopology {
    pub indices: [usize; 12],
}

impl PatchTopology {
    pub fn new(indices: [usize; 12]) -> Self {
        PatchTopology { indices }
    }

    /// Point indices of boundary curve `k`, in traversal order.
    pub fn curve(&self, k: usize) -> [usize; 4] {
        let i = &self.indices;
        [i[3 * k], i[3 * k + 1], i[3 * k + 2], i[(3 * k + 3) % 12]]
    }

    pub fn corner(&self, k: usize) -> usize {
        self.indices[3 * k]
    }

    pub fn reversed(&self) -> PatchTopology {
        PatchTopology {
            indices: std::array::from_fn(|k| self.indices[(12 - k) % 12]),
        }
    }

    pub fn gather(&self, points: &[Vec3]) -> CoonsPatch {
        CoonsPatch::new(self.indices.map(|i| points[i]))
    }
}

/// Orientation-independent key of a boundary curve and whether `curve`
/// runs in the key's direction.
pub(crate) fn curve_key(curve: [usize; 4]) -> ([usize; 4], bool) {
    let mut rev = curve;
    rev.reverse();
    if curve <= rev {
        (curve, true)
    } else {
        (rev, false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologyIssue {
    IndexOutOfRange { patch: usize, slot: usize, index: usize },
    RepeatedIndex { patch: usize, index: usize },
    CurveOverShared { curve: [usize; 4], patches: Vec<usize> },
    OrientationMismatch { curve: [usize; 4], patches: [usize; 2] },
    OpenCurve { patch: usize, curve: usize },
}

impl TopologyIssue {
    /// Open curves make a template non-closed but still usable.
    pub fn is_warning(&self) -> bool {
        matches!(self, TopologyIssue::OpenCurve { .. })
    }
}

impl fmt::Display for TopologyIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyIssue::IndexOutOfRange { patch, slot, index } => {
                write!(f, "patch {patch} slot {slot}: point index {index} out of range")
            }
            TopologyIssue::RepeatedIndex { patch, index } => {
                write!(f, "patch {patch}: point index {index} used more than once")
            }
            TopologyIssue::CurveOverShared { curve, patches } => {
                write!(f, "curve {curve:?} shared by {} patches {patches:?}", patches.len())
            }
            TopologyIssue::OrientationMismatch { curve, patches } => write!(
                f,
                "curve {curve:?} traversed in the same direction by patches {} and {}",
                patches[0], patches[1]
            ),
            TopologyIssue::OpenCurve { patch, curve } => {
                write!(f, "patch {patch} curve c{} is open (not shared)", curve + 1)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<TopologyIssue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    /// No errors; open curves allowed.
    pub fn is_valid(&self) -> bool {
        self.issues.iter().all(TopologyIssue::is_warning)
    }

    pub fn errors(&self) -> impl Iterator<Item = &TopologyIssue> {
        self.issues.iter().filter(|i| !i.is_warning())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &TopologyIssue> {
        self.issues.iter().filter(|i| i.is_warning())
    }

    pub fn open_curves(&self) -> usize {
        self.warnings().count()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, issue) in self.issues.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// Checks index ranges and curve sharing for a set of patches over
/// `point_count` points.
pub fn validate_patches(patches: &[PatchTopology], point_count: usize) -> ValidationReport {
    let mut issues = Vec::new();
    let mut in_range = vec![true; patches.len()];
    for (p, topo) in patches.iter().enumerate() {
        for (slot, &index) in topo.indices.iter().enumerate() {
            if index >= point_count {
                issues.push(TopologyIssue::IndexOutOfRange { patch: p, slot, index });
                in_range[p] = false;
            }
        }
        let mut sorted = topo.indices;
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                issues.push(TopologyIssue::RepeatedIndex { patch: p, index: w[0] });
            }
        }
    }
    let mut uses: BTreeMap<[usize; 4], Vec<(usize, usize, bool)>> = BTreeMap::new();
    for (p, topo) in patches.iter().enumerate() {
        if !in_range[p] {
            continue;
        }
        for k in 0..4 {
            let (key, forward) = curve_key(topo.curve(k));
            uses.entry(key).or_default().push((p, k, forward));
        }
    }
    for (key, users) in &uses {
        match users.as_slice() {
            [(p, k, _)] => issues.push(TopologyIssue::OpenCurve { patch: *p, curve: *k }),
            [(a, _, fa), (b, _, fb)] => {
                if fa == fb {
                    issues.push(TopologyIssue::OrientationMismatch {
                        curve: *key,
                        patches: [*a, *b],
                    });
                }
            }
            many => issues.push(TopologyIssue::CurveOverShared {
                curve: *key,
                patches: many.iter().map(|u| u.0).collect(),
            }),
        }
    }
    ValidationReport { issues }
}

/// Rest-pose geometry and patch topology of a deformable template.
#[derive(Clone, Debug, PartialEq)]
pub struct Template {
    pub name: String,
    pub points: Vec<Vec3>,
    pub patches: Vec<PatchTopology>,
    /// Bounding-box diagonal of the rest pose.
    pub scale_hint: f64,
}

impl Template {
    /// Builds a template, computing `scale_hint` from the points.
    pub fn new(name: impl Into<String>, points: Vec<Vec3>, patches: Vec<PatchTopology>) -> Self {
        let scale_hint = Aabb::from_points(&points).map_or(0.0, |b| b.diagonal());
        Template {
            name: name.into(),
            points,
            patches,
            scale_hint,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate_patches(&self.patches, self.points.len())
    }

    pub fn bounds(&self) -> Option<Aabb> {
        Aabb::from_points(&self.points)
    }

    /// Number of patch references to each point.
    pub fn multiplicity(&self) -> Vec<usize> {
        multiplicity(&self.patches, self.points.len())
    }

    pub fn rest_pose(&self) -> PatchCollection {
        PatchCollection {
            points: self.points.clone(),
            patches: self.patches.clone(),
        }
    }

    /// Same topology over new coordinates.
    pub fn instantiate(&self, points: Vec<Vec3>) -> Result<PatchCollection, TemplateError> {
        if points.len() != self.points.len() {
            return Err(TemplateError::PointCount {
                expected: self.points.len(),
                got: points.len(),
            });
        }
        Ok(PatchCollection {
            points,
            patches: self.patches.clone(),
        })
    }
}

pub(crate) fn multiplicity(patches: &[PatchTopology], point_count: usize) -> Vec<usize> {
    let mut m = vec![0; point_count];
    for p in patches {
        for &i in &p.indices {
            m[i] += 1;
        }
    }
    m
}

/// Patches over a concrete (typically optimized) set of control points.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchCollection {
    pub points: Vec<Vec3>,
    pub patches: Vec<PatchTopology>,
}

impl PatchCollection {
    pub fn new(points: Vec<Vec3>, patches: Vec<PatchTopology>) -> Result<Self, TemplateError> {
        let report = validate_patches(&patches, points.len());
        if !report.is_valid() {
            return Err(TemplateError::Topology(report));
        }
        Ok(PatchCollection { points, patches })
    }

    pub fn len(&self) -> usize {
        self.patches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patches.is_empty()
    }

    pub fn patch(&self, i: usize) -> CoonsPatch {
        self.patches[i].gather(&self.points)
    }

    pub fn iter_patches(&self) -> impl Iterator<Item = CoonsPatch> + '_ {
        self.patches.iter().map(|t| t.gather(&self.points))
    }

    pub fn map_points(&self, f: impl Fn(Vec3) -> Vec3) -> PatchCollection {
        PatchCollection {
            points: self.points.iter().map(|&p| f(p)).collect(),
            patches: self.patches.clone(),
        }
    }

    /// Merged `n x n` tessellation of every patch. Grid nodes on a boundary
    /// curve shared by several patches become one vertex, so a closed
    /// template yields a watertight mesh.
    pub fn tessellate(&self, n: usize) -> TriangleMesh {
        assert!(n >= 1, "tessellation resolution must be at least 1");
        #[derive(Hash, PartialEq, Eq)]
        enum Node {
            Point(usize),
            Curve([usize; 4], usize),
            Interior(usize, usize),
        }
        let mut ids: HashMap<Node, usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut faces = Vec::with_capacity(2 * n * n * self.len());
        for (pi, topo) in self.patches.iter().enumerate() {
            let grid = grid_points(&topo.gather(&self.points), n);
            let node = |i: usize, j: usize| -> Node {
                let (k, m) = match (i, j) {
                    (0, 0) => return Node::Point(topo.corner(0)),
                    (i, 0) if i == n => return Node::Point(topo.corner(1)),
                    (i, j) if i == n && j == n => return Node::Point(topo.corner(2)),
                    (0, j) if j == n => return Node::Point(topo.corner(3)),
                    (i, 0) => (0, i),
                    (i, j) if i == n => (1, j),
                    (i, j) if j == n => (2, n - i),
                    (0, j) => (3, n - j),
                    _ => return Node::Interior(pi, grid_index(n, i, j)),
                };
                let (key, forward) = curve_key(topo.curve(k));
                Node::Curve(key, if forward { m } else { n - m })
            };
            let mut local = vec![0; (n + 1) * (n + 1)];
            for j in 0..=n {
                for i in 0..=n {
                    let g = grid_index(n, i, j);
                    local[g] = *ids.entry(node(i, j)).or_insert_with(|| {
                        vertices.push(grid[g]);
                        vertices.len() - 1
                    });
                }
            }
            for j in 0..n {
                for i in 0..n {
                    let v00 = local[grid_index(n, i, j)];
                    let v10 = local[grid_index(n, i + 1, j)];
                    let v11 = local[grid_index(n, i + 1, j + 1)];
                    let v01 = local[grid_index(n, i, j + 1)];
                    faces.push([v00, v10, v11]);
                    faces.push([v00, v11, v01]);
                }
            }
        }
        TriangleMesh::from_parts_unchecked(vertices, faces)
    }
}
