use std::path::{Path, PathBuf};
use std::process::Command;

use rayon::prelude::*;

use super::contours::{augment_contours, AugmentParams};
use super::drawing::{load_drawing, VectorDrawing};
use super::raster::{rasterize, GrayImage};
use super::svg::import_svg;
use super::AugmentError;
use crate::fit::derive_seed;

pub const MANIFEST_NAME: &str = "manifest.tsv";
pub const MANIFEST_HEADER: &str = "output\tsource\tseed\twidth\tparams";

#[derive(Clone, Debug)]
pub struct BatchConfig {
    pub params: AugmentParams,
    pub widths: Vec<f64>,
    pub count: usize,
    pub out_size: usize,
    pub seed: u64,
    /// Command run once per written image with the image path appended
    /// as its last argument.
    pub hook: Option<String>,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            params: AugmentParams::default(),
            widths: vec![1.0, 2.0, 3.0],
            count: 4,
            out_size: 256,
            seed: 0,
            hook: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestRow {
    pub output: String,
    pub source: PathBuf,
    pub seed: u64,
    pub width: f64,
    pub params: AugmentParams,
}

#[derive(Clone, Debug, Default)]
pub struct BatchReport {
    pub rows: Vec<ManifestRow>,
    pub skipped: Vec<(PathBuf, String)>,
    pub manifest: PathBuf,
}

/// Loads a drawing file, dispatching on the extension (`.svg` or the
/// structured text format).
pub fn load_any(path: &Path) -> Result<VectorDrawing, AugmentError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("svg") => import_svg(&std::fs::read_to_string(path)?),
        _ => load_drawing(path),
    }
}

/// Augments and rasterizes one drawing with an explicit seed. Running this
/// with a manifest row's values reproduces that row's image.
pub fn render_item(d: &VectorDrawing, params: &AugmentParams, seed: u64, width: f64, out_size: usize) -> GrayImage {
    let (aug, _) = augment_contours(d, params, seed);
    rasterize(&aug, width, out_size)
}

fn run_hook(hook: &str, image: &Path) -> Result<(), AugmentError> {
    let mut parts = hook.split_whitespace();
    let program = parts.next().ok_or_else(|| AugmentError::Hook("empty hook command".into()))?;
    let status = Command::new(program)
        .args(parts)
        .arg(image)
        .status()
        .map_err(|e| AugmentError::Hook(format!("{program}: {e}")))?;
    if status.success() {
        Ok(())
    } else {
        Err(AugmentError::Hook(format!("{program} exited with {status}")))
    }
}

fn input_files(dir: &Path) -> Result<Vec<PathBuf>, AugmentError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && matches!(
                    p.extension().and_then(|e| e.to_str()).map(|e| e.to_ascii_lowercase()).as_deref(),
                    Some("json" | "svg")
                )
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Writes `count × widths` bitmaps per readable drawing in `input` to
/// `output` as `<stem>_<k>_w<width>.png`, plus a manifest. Unreadable
/// inputs are logged and skipped.
pub fn batch_augment(input: &Path, output: &Path, cfg: &BatchConfig) -> Result<BatchReport, AugmentError> {
    if !cfg.params.is_valid() {
        return Err(AugmentError::Invalid("augmentation parameters out of range".into()));
    }
    if cfg.widths.iter().any(|&w| !(w >= 1.0)) || cfg.out_size < 16 {
        return Err(AugmentError::Invalid("widths must be >= 1 and output size >= 16".into()));
    }
    std::fs::create_dir_all(output)?;
    let files = input_files(input)?;
    let mut skipped = Vec::new();
    let mut jobs = Vec::new();
    for (i, path) in files.iter().enumerate() {
        let drawing = match load_any(path) {
            Ok(d) => d,
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                skipped.push((path.clone(), e.to_string()));
                continue;
            }
        };
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("drawing").to_string();
        let input_seed = derive_seed(cfg.seed, i as u64);
        for k in 0..cfg.count {
            let seed = derive_seed(input_seed, k as u64);
            for &w in &cfg.widths {
                jobs.push((path.clone(), stem.clone(), drawing.clone(), k, seed, w));
            }
        }
    }
    let rows: Vec<ManifestRow> = jobs
        .into_par_iter()
        .map(|(source, stem, drawing, k, seed, width)| {
            let name = format!("{stem}_{k}_w{width}.png");
            let target = output.join(&name);
            render_item(&drawing, &cfg.params, seed, width, cfg.out_size).save_png(&target)?;
            if let Some(hook) = &cfg.hook {
                run_hook(hook, &target)?;
            }
            Ok(ManifestRow {
                output: name,
                source,
                seed,
                width,
                params: cfg.params,
            })
        })
        .collect::<Result<_, AugmentError>>()?;
    let manifest = output.join(MANIFEST_NAME);
    let mut text = String::from(MANIFEST_HEADER);
    text.push('\n');
    for r in &rows {
        let params = serde_json::to_string(&r.params).map_err(|e| AugmentError::Invalid(e.to_string()))?;
        text.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", r.output, r.source.display(), r.seed, r.width, params));
    }
    std::fs::write(&manifest, text)?;
    Ok(BatchReport { rows, skipped, manifest })
}

/// Parses a manifest written by [`batch_augment`].
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>, AugmentError> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    if lines.next() != Some(MANIFEST_HEADER) {
        return Err(AugmentError::Invalid("not a manifest".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            let f: Vec<&str> = l.splitn(5, '\t').collect();
            let bad = || AugmentError::Invalid(format!("bad manifest row: {l}"));
            if f.len() != 5 {
                return Err(bad());
            }
            Ok(ManifestRow {
                output: f[0].to_string(),
                source: PathBuf::from(f[1]),
                seed: f[2].parse().map_err(|_| bad())?,
                width: f[3].parse().map_err(|_| bad())?,
                params: serde_json::from_str(f[4]).map_err(|_| bad())?,
            })
        })
        .collect()
}
