use std::fmt::Write as _;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::vec3::Vec3;

use super::{MeshError, TriangleMesh};

/// Formats `x` with `digits` significant digits in plain decimal notation,
/// trimming trailing zeros.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".to_string() } else { x.to_string() };
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exponent).clamp(0, 40) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

pub fn load_obj(path: impl AsRef<Path>) -> Result<TriangleMesh, MeshError> {
    let text = std::fs::read_to_string(path)?;
    parse_obj(&text)
}

/// Parses the `v`/`f` subset of ASCII OBJ. Polygons are fan-triangulated
/// around their first vertex; other records are ignored.
pub fn parse_obj(text: &str) -> Result<TriangleMesh, MeshError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let err = |msg: String| MeshError::Parse { line, msg };
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut fields = content.split_whitespace();
        match fields.next() {
            Some("v") => {
                let coords: Vec<f64> = fields
                    .take(3)
                    .map(|f| f.parse::<f64>().map_err(|e| err(format!("bad coordinate {f:?}: {e}"))))
                    .collect::<Result<_, _>>()?;
                if coords.len() != 3 {
                    return Err(err("vertex needs three coordinates".into()));
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut poly = Vec::new();
                for f in fields {
                    let head = f.split('/').next().unwrap_or("");
                    let idx: i64 = head
                        .parse()
                        .map_err(|e| err(format!("bad face index {f:?}: {e}")))?;
                    let resolved = match idx {
                        0 => return Err(err("face index 0 (OBJ indices are 1-based)".into())),
                        i if i > 0 => i - 1,
                        i => vertices.len() as i64 + i,
                    };
                    if resolved < 0 || resolved as usize >= vertices.len() {
                        return Err(err(format!(
                            "face index {idx} out of range ({} vertices so far)",
                            vertices.len()
                        )));
                    }
                    poly.push(resolved as usize);
                }
                if poly.len() < 3 {
                    return Err(err("face needs at least three vertices".into()));
                }
                for k in 1..poly.len() - 1 {
                    faces.push([poly[0], poly[k], poly[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriangleMesh::new(vertices, faces)
}

pub fn write_obj(mesh: &TriangleMesh, out: &mut impl Write) -> std::io::Result<()> {
    let mut line = String::new();
    for v in &mesh.vertices {
        line.clear();
        let _ = writeln!(
            line,
            "v {} {} {}",
            format_significant(v.x, 9),
            format_significant(v.y, 9),
            format_significant(v.z, 9)
        );
        out.write_all(line.as_bytes())?;
    }
    for f in &mesh.faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

pub fn save_obj(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<(), MeshError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    write_obj(mesh, &mut w)?;
    w.flush()?;
    Ok(())
}
