use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::vec3::Vec3;

use super::{PatchTopology, Template, TemplateError};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateFile {
    name: String,
    points: Vec<[f64; 3]>,
    patches: Vec<Vec<usize>>,
    scale_hint: Option<f64>,
}

/// JSON text with every coordinate written to 17 significant digits.
pub fn template_to_string(t: &Template) -> String {
    let mut s = String::new();
    s.push_str("{\n");
    let _ = writeln!(s, "  \"name\": {},", serde_json::to_string(&t.name).unwrap_or_default());
    let _ = writeln!(s, "  \"scale_hint\": {:.16e},", t.scale_hint);
    s.push_str("  \"points\": [\n");
    for (k, p) in t.points.iter().enumerate() {
        let sep = if k + 1 < t.points.len() { "," } else { "" };
        let _ = writeln!(s, "    [{:.16e}, {:.16e}, {:.16e}]{sep}", p.x, p.y, p.z);
    }
    s.push_str("  ],\n  \"patches\": [\n");
    for (k, p) in t.patches.iter().enumerate() {
        let sep = if k + 1 < t.patches.len() { "," } else { "" };
        let idx: Vec<String> = p.indices.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(s, "    [{}]{sep}", idx.join(", "));
    }
    s.push_str("  ]\n}\n");
    s
}

/// Parses and validates a template document. Open curves are logged as
/// warnings; all other topology problems are errors.
pub fn parse_template(text: &str) -> Result<Template, TemplateError> {
    let raw: TemplateFile =
        serde_json::from_str(text).map_err(|e| TemplateError::Schema(e.to_string()))?;
    let mut patches = Vec::with_capacity(raw.patches.len());
    for (k, p) in raw.patches.iter().enumerate() {
        let indices: [usize; 12] = p.as_slice().try_into().map_err(|_| {
            TemplateError::Schema(format!("patch {k} has {} indices, expected 12", p.len()))
        })?;
        patches.push(PatchTopology::new(indices));
    }
    if let Some(i) = raw.points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
        return Err(TemplateError::Schema(format!("point {i} is not finite")));
    }
    let points: Vec<Vec3> = raw.points.into_iter().map(Vec3::from).collect();
    let mut t = Template::new(raw.name, points, patches);
    if let Some(h) = raw.scale_hint {
        if !(h > 0.0 && h.is_finite()) {
            return Err(TemplateError::Schema(format!("scale_hint {h} must be positive")));
        }
        t.scale_hint = h;
    }
    let report = t.validate();
    if !report.is_valid() {
        return Err(TemplateError::Topology(report));
    }
    for w in report.warnings() {
        log::warn!("template {:?}: {w}", t.name);
    }
    Ok(t)
}

pub fn load_template(path: impl AsRef<Path>) -> Result<Template, TemplateError> {
    parse_template(&std::fs::read_to_string(path)?)
}

pub fn save_template(t: &Template, path: impl AsRef<Path>) -> Result<(), TemplateError> {
    std::fs::write(path, template_to_string(t))?;
    Ok(())
}
