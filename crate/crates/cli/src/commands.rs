use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};

use coonsfit::augment::{batch_augment, BatchConfig};
use coonsfit::fit::{derive_seed, export_fit, fit_template, write_history, FitError, FitResult};
use coonsfit::intersect::{generate_dataset_at, mlp_train, IntersectionDataset, MlpClassifier, SampleKind};
use coonsfit::losses::{total_loss, Classifiers, LossInputs, LossWeights};
use coonsfit::mesh::{load_obj, sample_surface, save_obj, SpatialIndex};
use coonsfit::template::load_template;
use coonsfit::{build_cube_template, Template};

use crate::config::RunConfig;

pub const BUILTIN_CUBE: &str = "builtin:cube";

pub fn read_template(spec: &str) -> Result<Template> {
    if spec == BUILTIN_CUBE {
        return Ok(build_cube_template(1.0));
    }
    let t = load_template(spec).with_context(|| format!("loading template {spec}"))?;
    let report = t.validate();
    if !report.is_valid() {
        bail!("template {spec} is invalid:\n{report}");
    }
    Ok(t)
}

fn prepare_out(out: &Path, cfg: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    std::fs::write(out.join("config.toml"), cfg.to_toml())?;
    Ok(())
}

fn write_fit_outputs(result: &FitResult, template: &Template, cfg: &RunConfig, out: &Path) -> Result<()> {
    let paths = export_fit(result, template, out.join("fit"), cfg.tessellate.n)?;
    let mut w = BufWriter::new(File::create(out.join("history.tsv"))?);
    write_history(&result.history, &mut w)?;
    println!("template\t{}", paths.template.display());
    println!("mesh\t{}", paths.mesh.display());
    Ok(())
}

pub fn fit(cfg: &RunConfig, template: &str, mesh: &Path, out: &Path) -> Result<ExitCode> {
    let template = read_template(template)?;
    let target = load_obj(mesh).with_context(|| format!("loading mesh {}", mesh.display()))?;
    cfg.fit.validate()?;
    prepare_out(out, cfg)?;
    match fit_template(&template, &target, &cfg.fit) {
        Ok(result) => {
            write_fit_outputs(&result, &template, cfg, out)?;
            let b = result.best;
            println!(
                "best iteration {}: total {:.6e} chamfer {:.6e} normal {:.6e} ({:.1?}, converged: {})",
                b.iteration, b.total, b.chamfer, b.normal, result.elapsed, result.converged
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(FitError::Diverged { iteration, last }) => {
            write_fit_outputs(&last, &template, cfg, out)?;
            eprintln!("error: loss became non-finite at iteration {iteration}; wrote the last finite state");
            Ok(ExitCode::from(2))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn gen_intersect_data(cfg: &RunConfig, output: Option<&Path>, out: &Path) -> Result<ExitCode> {
    let d = &cfg.dataset;
    if d.count < 2 || d.resolution < 1 {
        bail!("dataset.count must be at least 2 and dataset.resolution at least 1");
    }
    let path = match output {
        Some(p) => p.to_path_buf(),
        None => {
            prepare_out(out, cfg)?;
            out.join(format!("{}.cxds", kind_name(d.kind)))
        }
    };
    let ds = generate_dataset_at(d.kind, d.count, d.seed, d.resolution);
    ds.save(&path).with_context(|| format!("writing {}", path.display()))?;
    println!(
        "{}\t{} samples\t{} draws\traw positive rate {:.4}",
        path.display(),
        ds.samples.len(),
        ds.stats.draws,
        ds.stats.raw_positive_rate()
    );
    Ok(ExitCode::SUCCESS)
}

fn kind_name(kind: SampleKind) -> &'static str {
    match kind {
        SampleKind::SelfIntersection => "self",
        SampleKind::Pair => "pair",
    }
}

pub fn train_mlp(cfg: &RunConfig, dataset: &Path, out: &Path) -> Result<ExitCode> {
    let ds = IntersectionDataset::load(dataset).with_context(|| format!("loading {}", dataset.display()))?;
    prepare_out(out, cfg)?;
    let (clf, report) = mlp_train(&ds, &cfg.train)?;
    let path = out.join(format!("{}.cxml", kind_name(ds.kind)));
    clf.save(&path)?;
    std::fs::write(out.join("train_report.json"), serde_json::to_string_pretty(&report)?)?;
    println!(
        "{}\theld-out accuracy {:.4} ({} train, {} held out)",
        path.display(),
        report.heldout_accuracy,
        report.train_size,
        report.heldout_size
    );
    Ok(ExitCode::SUCCESS)
}

pub fn augment(cfg: &RunConfig, input: &Path, out: &Path) -> Result<ExitCode> {
    let a = &cfg.augment;
    prepare_out(out, cfg)?;
    let report = batch_augment(
        input,
        out,
        &BatchConfig {
            params: a.params,
            widths: a.widths.clone(),
            count: a.count,
            out_size: a.out_size,
            seed: a.seed,
            hook: a.hook.clone(),
        },
    )?;
    println!(
        "{} bitmaps, {} inputs skipped, manifest {}",
        report.rows.len(),
        report.skipped.len(),
        report.manifest.display()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn tessellate(cfg: &RunConfig, template: &str, out: &Path) -> Result<ExitCode> {
    if cfg.tessellate.n == 0 {
        bail!("tessellate.n must be at least 1");
    }
    let t = read_template(template)?;
    prepare_out(out, cfg)?;
    let mesh = t.rest_pose().tessellate(cfg.tessellate.n);
    let path: PathBuf = out.join(format!("{}.obj", if t.name.is_empty() { "template" } else { &t.name }));
    save_obj(&mesh, &path)?;
    println!(
        "{}\t{} vertices\t{} faces\twatertight: {}",
        path.display(),
        mesh.vertices.len(),
        mesh.faces.len(),
        mesh.is_watertight()
    );
    Ok(ExitCode::SUCCESS)
}

pub fn eval_loss(cfg: &RunConfig, template: &str, instance: Option<&str>, mesh: &Path) -> Result<ExitCode> {
    let t = read_template(template)?;
    let pc = match instance {
        Some(spec) => t.instantiate(read_template(spec)?.points)?,
        None => t.rest_pose(),
    };
    let target = load_obj(mesh).with_context(|| format!("loading mesh {}", mesh.display()))?;
    let e = &cfg.eval;
    if e.patch_samples == 0 || e.target_samples == 0 || e.target_pool == 0 {
        bail!("eval sample counts must be at least 1");
    }
    let index = SpatialIndex::build(sample_surface(&target, e.target_pool, derive_seed(e.seed, u64::MAX))?)?;
    let subset = sample_surface(&target, e.target_samples, derive_seed(e.seed, u64::MAX - 1))?;
    let classifiers = if cfg.fit.intersection {
        let f = cfg.fit.self_classifier.as_ref().context("fit.self_classifier is not set")?;
        let g = cfg.fit.pair_classifier.as_ref().context("fit.pair_classifier is not set")?;
        Some((MlpClassifier::load(f)?, MlpClassifier::load(g)?))
    } else {
        None
    };
    let mut weights: LossWeights = cfg.fit.weights;
    if classifiers.is_none() {
        weights.self_x = 0.0;
        weights.pair_x = 0.0;
    }
    let inputs = LossInputs {
        template: &t,
        target_index: &index,
        target_samples: &subset,
        n_patch_samples: e.patch_samples,
        classifiers: classifiers.as_ref().map(|(f, g)| Classifiers { self_x: f, pair_x: g }),
        options: e.loss,
    };
    let b = total_loss(&pc, &inputs, &weights, &cfg.fit.decay, e.seed)?;
    println!("chamfer\t{:e}", b.chamfer);
    println!("normal\t{:e}", b.normal);
    println!("template\t{:e}", b.template);
    println!("self_x\t{:e}", b.self_x);
    println!("pair_x\t{:e}", b.pair_x);
    println!("total\t{:e}", b.total);
    println!("grad_max\t{:e}", b.gradient_max_norm());
    Ok(ExitCode::SUCCESS)
}
