//! Exact intersection oracle, training data, and learned intersection scorers.

pub mod dataset;
pub mod isometry;
pub mod mlp;
pub mod normalize;
pub mod oracle;
pub mod train;
pub mod tri_tri;

pub use dataset::{generate_dataset, generate_dataset_at, LABEL_RESOLUTION, label_coords, DrawStats, IntersectionDataset, IntersectionSample};
pub use isometry::{augment_isometry, Isometry, SquareSymmetry};
pub use mlp::{standard_widths, Mlp, MlpClassifier};
pub use normalize::{normalize_to_unit_cube, UnitCubeFrame};
pub use oracle::{count_self_intersections, patch_self_intersects, patches_intersect, patches_intersect_with_seams, SeamExemption};
pub use train::{mlp_train, TrainConfig, TrainReport};
pub use tri_tri::triangles_intersect;

#[derive(Debug, thiserror::Error)]
pub enum IntersectError {
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("malformed file: {0}")]
    Format(String),
    #[error("training diverged (non-finite loss) in epoch {epoch}")]
    Diverged { epoch: usize },
    #[error("dataset needs at least two samples")]
    EmptyDataset,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which classifier a sample belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    #[serde(rename = "self", alias = "self-intersection")]
    SelfIntersection = 0,
    Pair = 1,
}

impl SampleKind {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(SampleKind::SelfIntersection),
            1 => Some(SampleKind::Pair),
            _ => None,
        }
    }

    pub fn points(self) -> usize {
        match self {
            SampleKind::SelfIntersection => 12,
            SampleKind::Pair => 24,
        }
    }

    pub fn dim(self) -> usize {
        3 * self.points()
    }
}
