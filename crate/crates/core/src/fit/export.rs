use std::path::{Path, PathBuf};

use crate::mesh::{save_obj, MeshError};
use crate::template::{save_template, Template, TemplateError};

use super::FitResult;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExportPaths {
    pub template: PathBuf,
    pub mesh: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Writes the fitted control points in the target's frame as
/// `<stem>.json` (template format) and their welded tessellation at
/// resolution `tess_n` as `<stem>.obj`.
pub fn export_fit(result: &FitResult, template: &Template, stem: impl AsRef<Path>, tess_n: usize) -> Result<ExportPaths, ExportError> {
    let stem = stem.as_ref();
    let pc = result.pc_in_target_frame();
    let fitted = Template::new(format!("{}-fit", template.name), pc.points.clone(), pc.patches.clone());
    let paths = ExportPaths {
        template: stem.with_extension("json"),
        mesh: stem.with_extension("obj"),
    };
    save_template(&fitted, &paths.template)?;
    save_obj(&pc.tessellate(tess_n), &paths.mesh)?;
    Ok(paths)
}
