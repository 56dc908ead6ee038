//! Stochastic augmentation of vector line drawings and rasterization to
//! grayscale bitmaps.

mod batch;
mod contours;
mod drawing;
mod raster;
mod svg;

pub use batch::{
    batch_augment, load_any, read_manifest, render_item, BatchConfig, BatchReport, ManifestRow, MANIFEST_HEADER,
    MANIFEST_NAME,
};
pub use contours::{augment_contours, AugmentParams, AugmentReport, TruncationMode, REFERENCE_CANVAS};
pub use drawing::{arc_length, load_drawing, parse_drawing, save_drawing, sub_curve, Canvas, Point2, VectorDrawing};
pub use raster::{rasterize, GrayImage};
pub use svg::{import_svg, FLATTEN_TOLERANCE};

#[derive(Debug, thiserror::Error)]
pub enum AugmentError {
    #[error("invalid drawing: {0}")]
    Invalid(String),
    #[error("image encoding failed: {0}")]
    Image(String),
    #[error("hook failed: {0}")]
    Hook(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
