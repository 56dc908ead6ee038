use crate::vec3::Vec3;

use super::{MeshError, SurfaceSample};

const LEAF_SIZE: usize = 8;

#[derive(Clone, Debug)]
enum Node {
    Leaf { start: u32, end: u32 },
    Split { axis: u8, value: f64, left: u32, right: u32 },
}

/// Exact nearest-neighbour search over a fixed point set.
///
/// Ties are resolved toward the lowest point ordinal, so results match a
/// linear scan that keeps the first minimum.
#[derive(Clone, Debug)]
pub struct KdTree {
    points: Vec<Vec3>,
    order: Vec<u32>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn new(points: Vec<Vec3>) -> Result<Self, MeshError> {
        if points.is_empty() {
            return Err(MeshError::EmptyIndex);
        }
        let mut tree = KdTree {
            order: (0..points.len() as u32).collect(),
            points,
            nodes: Vec::new(),
        };
        let n = tree.points.len();
        tree.build(0, n);
        Ok(tree)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    fn build(&mut self, start: usize, end: usize) -> u32 {
        let id = self.nodes.len() as u32;
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf {
                start: start as u32,
                end: end as u32,
            });
            return id;
        }
        let pts = &self.points;
        let slice = &mut self.order[start..end];
        let mut lo = pts[slice[0] as usize];
        let mut hi = lo;
        for &i in slice.iter() {
            lo = lo.min(pts[i as usize]);
            hi = hi.max(pts[i as usize]);
        }
        let ext = hi - lo;
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| {
            pts[a as usize][axis].total_cmp(&pts[b as usize][axis])
        });
        let value = pts[slice[mid] as usize][axis];
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build(start, start + mid);
        let right = self.build(start + mid, end);
        self.nodes[id as usize] = Node::Split {
            axis: axis as u8,
            value,
            left,
            right,
        };
        id
    }

    /// Ordinal of the nearest point and its squared distance.
    pub fn nearest(&self, q: Vec3) -> (usize, f64) {
        let mut best = (u32::MAX, f64::INFINITY);
        self.search(0, q, &mut best);
        (best.0 as usize, best.1)
    }

    fn search(&self, node: u32, q: Vec3, best: &mut (u32, f64)) {
        match self.nodes[node as usize] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start as usize..end as usize] {
                    let d2 = self.points[i as usize].distance_squared(q);
                    if d2 < best.1 || (d2 == best.1 && i < best.0) {
                        *best = (i, d2);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis as usize] - value;
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.search(near, q, best);
                if diff * diff <= best.1 {
                    self.search(far, q, best);
                }
            }
        }
    }
}

/// Nearest-neighbour index over a set of surface samples.
#[derive(Clone, Debug)]
pub struct SpatialIndex {
    samples: Vec<SurfaceSample>,
    tree: KdTree,
}

impl SpatialIndex {
    pub fn build(samples: Vec<SurfaceSample>) -> Result<Self, MeshError> {
        let tree = KdTree::new(samples.iter().map(|s| s.position).collect())?;
        Ok(SpatialIndex { samples, tree })
    }

    pub fn samples(&self) -> &[SurfaceSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Nearest sample ordinal and Euclidean distance.
    pub fn nearest_index(&self, q: Vec3) -> (usize, f64) {
        let (i, d2) = self.tree.nearest(q);
        (i, d2.sqrt())
    }

    pub fn nearest(&self, q: Vec3) -> (&SurfaceSample, f64) {
        let (i, d) = self.nearest_index(q);
        (&self.samples[i], d)
    }
}
