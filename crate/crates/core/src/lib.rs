//! Deformable Coons-patch templates fitted to triangle meshes.
//!
//! The crate covers the full pipeline: patch geometry ([`geom`]),
//! templates with index-shared control points ([`template`]), target
//! meshes and sampling ([`mesh`]), the fitting losses with analytic
//! gradients ([`losses`]), the intersection oracle and learned
//! intersection scorers ([`intersect`]), the control-point optimizer
//! ([`fit`]) and sketch-contour augmentation ([`augment`]).

pub mod augment;
pub mod fit;
pub mod geom;
pub mod intersect;
pub mod losses;
pub mod mesh;
pub mod optim;
pub mod template;
pub mod vec3;

pub use geom::{BezierCurve, CoonsPatch, GeomError};
pub use mesh::{SpatialIndex, SurfaceSample, TriangleMesh};
pub use template::{build_cube_template, PatchCollection, PatchTopology, Template};
pub use vec3::Vec3;
