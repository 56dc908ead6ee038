use std::path::Path;
use std::process::{Command, Output};

use coonsfit::intersect::{IntersectionDataset, SampleKind};
use coonsfit::mesh::{load_obj, save_obj};
use coonsfit::{TriangleMesh, Vec3};

fn coonsfit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coonsfit"))
        .args(args)
        .env_remove("RUST_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn cube_obj(dir: &Path, lo: f64, hi: f64) -> String {
    let path = dir.join(format!("cube_{lo}_{hi}.obj"));
    save_obj(&TriangleMesh::cuboid(Vec3::splat(lo), Vec3::splat(hi)), &path).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn fit_writes_four_files() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = cube_obj(dir.path(), -0.5, 0.5);
    let out = dir.path().join("run");
    let o = coonsfit(&[
        "--out",
        out.to_str().unwrap(),
        "--set",
        "fit.iterations=20",
        "--set",
        "fit.patch_samples=500",
        "--set",
        "fit.target_pool=5000",
        "fit",
        "--template",
        "builtin:cube",
        "--mesh",
        &mesh,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["config.toml", "fit.json", "fit.obj", "history.tsv"]);
    let history = std::fs::read_to_string(out.join("history.tsv")).unwrap();
    assert_eq!(history.lines().count(), 21);
    let echoed = std::fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(echoed.contains("iterations = 20"));
    assert!(load_obj(out.join("fit.obj")).unwrap().is_watertight());
}

#[test]
fn fit_is_reproducible_with_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = cube_obj(dir.path(), 0.0, 2.0);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = coonsfit(&[
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "17",
            "--threads",
            "1",
            "--set",
            "fit.iterations=10",
            "--set",
            "fit.patch_samples=300",
            "--set",
            "fit.target_pool=3000",
            "fit",
            "--template",
            "builtin:cube",
            "--mesh",
            &mesh,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        (
            std::fs::read(out.join("history.tsv")).unwrap(),
            std::fs::read(out.join("fit.json")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn missing_mesh_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = coonsfit(&[
        "--out",
        dir.path().to_str().unwrap(),
        "fit",
        "--template",
        "builtin:cube",
        "--mesh",
        "/nonexistent/mesh.obj",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mesh"));
}

#[test]
fn intersection_without_classifiers_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = cube_obj(dir.path(), -0.5, 0.5);
    let o = coonsfit(&[
        "--out",
        dir.path().join("x").to_str().unwrap(),
        "--set",
        "fit.intersection=true",
        "fit",
        "--template",
        "builtin:cube",
        "--mesh",
        &mesh,
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("classifier path is not set"), "{}", stderr(&o));
}

#[test]
fn non_finite_loss_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = cube_obj(dir.path(), 5.0, 9.0);
    let out = dir.path().join("nan");
    let o = coonsfit(&[
        "--out",
        out.to_str().unwrap(),
        "--set",
        "fit.weights.chamfer=1.7976931348623157e308",
        "--set",
        "fit.normalize_target=false",
        "--set",
        "fit.iterations=5",
        "--set",
        "fit.target_pool=2000",
        "fit",
        "--template",
        "builtin:cube",
        "--mesh",
        &mesh,
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(out.join("fit.json").exists());
}

#[test]
fn bad_override_is_rejected() {
    let o = coonsfit(&["--set", "fit.no_such_field=1", "tessellate", "--template", "builtin:cube"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown config key"));
}

#[test]
fn env_override_applies() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_coonsfit"))
        .args(["--out", dir.path().to_str().unwrap(), "tessellate", "--template", "builtin:cube"])
        .env("COONSFIT_TESSELLATE__N", "3")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let mesh = load_obj(dir.path().join("cube.obj")).unwrap();
    assert_eq!(mesh.faces.len(), 6 * 2 * 9);
}

#[test]
fn tessellate_n8_is_watertight() {
    let dir = tempfile::tempdir().unwrap();
    let o = coonsfit(&["--out", dir.path().to_str().unwrap(), "tessellate", "--template", "builtin:cube", "--n", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mesh = load_obj(dir.path().join("cube.obj")).unwrap();
    assert_eq!(mesh.faces.len(), 768);
    // every edge in exactly two faces
    assert!(mesh.edge_face_counts().values().all(|&c| c == 2));
    assert!((mesh.total_area() - 6.0).abs() < 1e-6);
}

#[test]
fn eval_loss_rest_pose_template_term_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = cube_obj(dir.path(), -0.5, 0.5);
    let o = coonsfit(&[
        "--set",
        "eval.target_pool=20000",
        "eval-loss",
        "--template",
        "builtin:cube",
        "--mesh",
        &mesh,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let value = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}\t")))
            .unwrap_or_else(|| panic!("no {key} in {text}"))
            .parse()
            .unwrap()
    };
    assert_eq!(value("template"), 0.0);
    assert!(value("chamfer") < 1e-3);
    assert!(value("normal") < 0.01);
}

#[test]
fn gen_intersect_data_writes_requested_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("self.cxds");
    let o = coonsfit(&[
        "--seed",
        "4",
        "--set",
        "dataset.resolution=6",
        "gen-intersect-data",
        "--kind",
        "self",
        "--count",
        "1000",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], b"CXDS");
    // count field after magic, version and kind
    assert_eq!(u64::from_le_bytes(bytes[9..17].try_into().unwrap()), 1000);
    let ds = IntersectionDataset::load(&path).unwrap();
    assert_eq!(ds.kind, SampleKind::SelfIntersection);
    assert_eq!(ds.samples.iter().filter(|s| s.label).count(), 500);
}

#[test]
fn train_mlp_writes_classifier() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("pair.cxds");
    let o = coonsfit(&[
        "--set",
        "dataset.resolution=4",
        "gen-intersect-data",
        "--kind",
        "pair",
        "--count",
        "40",
        "--output",
        data.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = dir.path().join("model");
    let o = coonsfit(&[
        "--out",
        out.to_str().unwrap(),
        "--set",
        "train.epochs=2",
        "--set",
        "train.hidden=[16, 8]",
        "train-mlp",
        "--dataset",
        data.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let clf = coonsfit::intersect::MlpClassifier::load(out.join("pair.cxml")).unwrap();
    assert_eq!(clf.widths(), vec![72, 16, 8, 1]);
    assert!(out.join("train_report.json").exists());
}

#[test]
fn augment_writes_bitmaps_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("drawings");
    std::fs::create_dir(&input).unwrap();
    std::fs::write(
        input.join("a.json"),
        r#"{"canvas": {"width": 256, "height": 256}, "curves": [[[10, 10], [240, 30], [200, 240]]]}"#,
    )
    .unwrap();
    std::fs::write(
        input.join("b.svg"),
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 100 100"><path d="M 10 10 C 90 10 90 90 10 90"/></svg>"#,
    )
    .unwrap();
    let out = dir.path().join("aug");
    let o = coonsfit(&[
        "--out",
        out.to_str().unwrap(),
        "--set",
        "augment.count=2",
        "--set",
        "augment.widths=[1, 2.5]",
        "--set",
        "augment.out_size=64",
        "augment",
        "--input",
        input.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest = std::fs::read_to_string(out.join("manifest.tsv")).unwrap();
    assert_eq!(manifest.lines().count(), 1 + 2 * 2 * 2);
    assert!(out.join("a_1_w2.5.png").exists());
    assert!(out.join("b_0_w1.png").exists());
}

#[test]
fn help_lists_every_config_field() {
    let o = coonsfit(&["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for key in [
        "fit.iterations = 2000",
        "fit.step = 0.0001",
        "fit.decay.gamma = 0.4",
        "fit.decay.period = 600.0",
        "fit.weights.normal = 0.05",
        "fit.loss.distance = \"squared\"",
        "dataset.resolution = 32",
        "train.keep_prob = 0.85",
        "augment.params.truncate_prob = 0.2",
        "augment.hook = null",
        "tessellate.n = 8",
        "eval.patch_samples = 5000",
    ] {
        assert!(text.contains(key), "missing `{key}`");
    }
}
