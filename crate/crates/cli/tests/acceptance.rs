//! Acceptance gate: one `[PASS]`/`[FAIL]` line per criterion, nonzero exit
//! if any fails.

use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coonsfit::augment::{augment_contours, AugmentParams, Canvas, VectorDrawing};
use coonsfit::fit::{fit_template, FitConfig};
use coonsfit::geom::tessellate;
use coonsfit::intersect::{
    generate_dataset, mlp_train, patch_self_intersects, patches_intersect, IntersectionDataset, Mlp, MlpClassifier,
    SampleKind, TrainConfig,
};
use coonsfit::losses::{
    assign, chamfer_directions_with, chamfer_loss, chamfer_with, draw_params, evaluate, intersection_losses, normal_loss, normal_with,
    template_loss, AreaNormalization, DecaySchedule, DistanceKind, LossOptions,
};
use coonsfit::mesh::sample_surface;
use coonsfit::template::save_template;
use coonsfit::vec3::Mat3;
use coonsfit::{
    build_cube_template, CoonsPatch, PatchCollection, PatchTopology, SpatialIndex, SurfaceSample, Template,
    TriangleMesh, Vec3,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn work_dir() -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&d).unwrap();
    d
}

// ---------------------------------------------------------------- 1

const FD_STEP: f64 = 1e-5;

/// Two jittered patches sharing one boundary curve.
fn strip(rng: &mut impl Rng) -> Template {
    let a: [usize; 12] = std::array::from_fn(|k| k);
    let b: [usize; 12] = [3, 12, 13, 14, 15, 16, 17, 18, 19, 6, 5, 4];
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let ring = |k: usize, x0: f64| {
        let (p, q) = (corners[k / 3], corners[(k / 3 + 1) % 4]);
        let f = (k % 3) as f64 / 3.0;
        Vec3::new(x0 + p.0 + (q.0 - p.0) * f, p.1 + (q.1 - p.1) * f, 0.0)
    };
    let mut points = vec![Vec3::ZERO; 20];
    for k in 0..12 {
        points[a[k]] = ring(k, 0.0);
        points[b[k]] = ring(k, 1.0);
    }
    for p in &mut points {
        *p += Vec3::new(rng.random(), rng.random(), rng.random()) * 0.3 - Vec3::splat(0.15);
    }
    Template::new("strip", points, vec![PatchTopology::new(a), PatchTopology::new(b)])
}

/// Worst ratio of |fd - analytic| to max(1e-8, 1e-4 max(|fd|, |analytic|)).
fn fd_ratio(pc: &PatchCollection, f: &dyn Fn(&PatchCollection) -> (f64, Vec<Vec3>)) -> f64 {
    let (_, grad) = f(pc);
    let mut worst: f64 = 0.0;
    for i in 0..pc.points.len() {
        for axis in 0..3 {
            let mut up = pc.clone();
            let mut dn = pc.clone();
            up.points[i][axis] += FD_STEP;
            dn.points[i][axis] -= FD_STEP;
            let fd = (f(&up).0 - f(&dn).0) / (2.0 * FD_STEP);
            let g = grad[i][axis];
            worst = worst.max((fd - g).abs() / (1e-4 * fd.abs().max(g.abs())).max(1e-8));
        }
    }
    worst
}

fn random_classifier(input: usize, seed: u64) -> MlpClassifier {
    let mut m = Mlp::new(&[input, 64, 32, 1], seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for l in &mut m.layers {
        l.bias.mapv_inplace(|_| rng.random_range(-0.3..0.3));
    }
    m
}

fn gradient_suite() -> Outcome {
    let start = Instant::now();
    let f = random_classifier(36, 101);
    let g = random_classifier(72, 102);
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut note = |k: &'static str, v: f64| {
        let e = worst.entry(k).or_insert(0.0);
        *e = e.max(v);
    };
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let template = strip(&mut rng);
        let pc = template.rest_pose().map_points(|p| p + Vec3::new(0.0, 0.05 * p.x, 0.1 * p.x * p.y));
        let targets: Vec<SurfaceSample> = (0..50)
            .map(|_| SurfaceSample {
                position: Vec3::new(rng.random_range(-0.2..2.2), rng.random_range(-0.2..1.2), rng.random_range(-0.3..0.3)),
                normal: Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 1.0).normalized().unwrap(),
            })
            .collect();
        let index = SpatialIndex::build(targets.clone()).unwrap();
        let params = draw_params(2, 20, seed);
        let assignment = assign(&evaluate(&pc, &params), &index, &targets).unwrap();
        for (name, distance, normalization) in [
            ("chamfer/squared/global", DistanceKind::Squared, AreaNormalization::Global),
            ("chamfer/squared/per-patch", DistanceKind::Squared, AreaNormalization::PerPatch),
            ("chamfer/euclidean/global", DistanceKind::Euclidean, AreaNormalization::Global),
            ("chamfer/euclidean/per-patch", DistanceKind::Euclidean, AreaNormalization::PerPatch),
        ] {
            let options = LossOptions { distance, normalization };
            let eval = |q: &PatchCollection| {
                let pts = evaluate(q, &params);
                chamfer_directions_with(q, &pts, index.samples(), &targets, &assignment, &options).unwrap()
            };
            note(name, fd_ratio(&pc, &|q| {
                let (parts, [g, _]) = eval(q);
                (parts.to_target, g)
            }));
            note(name, fd_ratio(&pc, &|q| {
                let (parts, [_, g]) = eval(q);
                (parts.to_patch, g)
            }));
            note(name, fd_ratio(&pc, &|q| {
                let pts = evaluate(q, &params);
                let (parts, g) = chamfer_with(q, &pts, index.samples(), &targets, &assignment, &options).unwrap();
                (parts.total(), g)
            }));
        }
        note(
            "normal",
            fd_ratio(&pc, &|q| normal_with(q, &evaluate(q, &params), index.samples(), &assignment).unwrap()),
        );
        let sched = DecaySchedule::default().at(seed as usize * 53);
        note("template", fd_ratio(&pc, &|q| template_loss(q, &template, &sched).unwrap()));

        let mut apart = template.clone();
        apart.patches[1] = PatchTopology::new(std::array::from_fn(|k| 12 + k));
        apart.points.extend((0..4).map(|k| {
            Vec3::new(k as f64 + rng.random::<f64>() * 0.2, 2.0 + rng.random::<f64>(), 0.5 + rng.random::<f64>())
        }));
        let apc = apart.rest_pose();
        note(
            "self-intersection",
            fd_ratio(&apc, &|q| {
                let (s, _, grad) = coonsfit::losses::intersection_losses_weighted(q, &f, &g, 1.0, 0.0).unwrap();
                (s, grad)
            }),
        );
        note(
            "pair-intersection",
            fd_ratio(&apc, &|q| {
                let (_, p, grad) = coonsfit::losses::intersection_losses_weighted(q, &f, &g, 0.0, 1.0).unwrap();
                (p, grad)
            }),
        );
    }
    let elapsed = start.elapsed();
    let names: Vec<_> = worst.iter().collect();
    let pass = names.iter().all(|(_, v)| **v < 1.0) && elapsed < Duration::from_secs(120);
    let summary: Vec<String> = names.iter().map(|(k, v)| format!("{k} {v:.3}")).collect();
    outcome(
        pass,
        format!("20 configs, worst error/tolerance: {} ({elapsed:.1?})", summary.join(", ")),
    )
}

// ---------------------------------------------------------------- 2, 3

fn unit_cube_mesh() -> TriangleMesh {
    TriangleMesh::cuboid(Vec3::splat(-0.5), Vec3::splat(0.5))
}

fn cube_fit() -> Outcome {
    let template = build_cube_template(1.0);
    let target = unit_cube_mesh();
    let cfg = FitConfig {
        seed: 5,
        ..FitConfig::default()
    };
    assert_eq!((cfg.iterations, cfg.patch_samples), (2000, 5000));
    let start = Instant::now();
    let r = fit_template(&template, &target, &cfg).expect("fit runs");
    let elapsed = start.elapsed();
    // fresh evaluation of the returned shape, independent of the fit's draws
    let pool = sample_surface(&target, 200_000, 777).unwrap();
    let subset = sample_surface(&target, 5000, 778).unwrap();
    let index = SpatialIndex::build(pool).unwrap();
    let pc = r.pc_in_target_frame();
    let (chamfer, _) = chamfer_loss(&pc, &index, &subset, 5000, 779, &LossOptions::default()).unwrap();
    let (normal, _) = normal_loss(&pc, &index, 5000, 779).unwrap();
    let pass = chamfer < 1e-3 && normal < 0.01 && elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!("chamfer {chamfer:.3e}, normal {normal:.3e}, {} iterations in {elapsed:.1?}", r.history.len()),
    )
}

fn scaled_cube() -> Outcome {
    let template = build_cube_template(1.0);
    let offset = Vec3::new(0.3, -1.2, 2.0);
    let target = TriangleMesh::cuboid(Vec3::splat(-0.75) + offset, Vec3::splat(0.75) + offset);
    let cfg = FitConfig {
        iterations: 600,
        seed: 9,
        ..FitConfig::default()
    };
    let r = fit_template(&template, &target, &cfg).expect("fit runs");
    let fitted = r.pc_in_target_frame();
    let worst = template
        .points
        .iter()
        .zip(&fitted.points)
        .map(|(rest, got)| (*rest * 1.5 + offset - *got).norm())
        .fold(0.0, f64::max);
    outcome(worst < 0.02, format!("largest control-point error {worst:.4} over {} points", fitted.points.len()))
}

// ---------------------------------------------------------------- 4

fn random_patch(rng: &mut impl Rng) -> CoonsPatch {
    CoonsPatch::new(std::array::from_fn(|_| Vec3::new(rng.random(), rng.random(), rng.random())))
}

fn random_rigid(rng: &mut impl Rng) -> impl Fn(Vec3) -> Vec3 {
    let axis = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        .normalized()
        .unwrap();
    let r = Mat3::from_axis_angle(axis, rng.random_range(0.0..std::f64::consts::TAU));
    let shift = Vec3::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    move |p| r * p + shift
}

fn oracle_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut self_agree, mut pair_agree) = (0, 0);
    let mut asymmetric = 0;
    let mut not_rigid = 0;
    let mut positives = 0;
    for _ in 0..200 {
        let p = random_patch(&mut rng);
        let (a, b) = (patch_self_intersects(&p, 32), patch_self_intersects(&p, 64));
        self_agree += (a == b) as usize;
        positives += a as usize;
        let motion = random_rigid(&mut rng);
        not_rigid += (patch_self_intersects(&p.map_points(&motion), 32) != a) as usize;

        // pairs from two half-size boxes overlapping in a slab, so both
        // labels occur
        let q = random_patch(&mut rng).map_points(|v| v + Vec3::new(0.6, 0.0, 0.0));
        let (x, y) = (patches_intersect(&p, &q, 32), patches_intersect(&p, &q, 64));
        pair_agree += (x == y) as usize;
        asymmetric += (patches_intersect(&q, &p, 32) != x) as usize;
        not_rigid += (patches_intersect(&p.map_points(&motion), &q.map_points(&motion), 32) != x) as usize;
    }
    let pass = self_agree >= 198 && pair_agree >= 198 && asymmetric == 0 && not_rigid == 0;
    outcome(
        pass,
        format!(
            "n=32 vs n=64 agreement: self {self_agree}/200 ({positives} positive), pair {pair_agree}/200; \
             asymmetric {asymmetric}, rigid-motion changes {not_rigid}"
        ),
    )
}

// ---------------------------------------------------------------- 5, 6

const DATASET_SIZE: usize = 10_000;

fn dataset(kind: SampleKind, seed: u64) -> IntersectionDataset {
    let name = match kind {
        SampleKind::SelfIntersection => "self",
        SampleKind::Pair => "pair",
    };
    let path = work_dir().join(format!("{name}-{DATASET_SIZE}-{seed}.cxds"));
    if let Ok(d) = IntersectionDataset::load(&path) {
        if d.kind == kind && d.samples.len() == DATASET_SIZE {
            return d;
        }
    }
    let d = generate_dataset(kind, DATASET_SIZE, seed);
    d.save(&path).unwrap();
    d
}

fn acceptance_training() -> TrainConfig {
    TrainConfig {
        epochs: 40,
        batch_size: 64,
        learning_rate: 1e-4,
        keep_prob: 1.0,
        seed: 3,
        ..TrainConfig::default()
    }
}

fn classifiers(self_clf: &mut Option<MlpClassifier>) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (kind, seed) in [(SampleKind::SelfIntersection, 21), (SampleKind::Pair, 22)] {
        let start = Instant::now();
        let ds = dataset(kind, seed);
        let positives = ds.samples.iter().filter(|s| s.label).count();
        assert_eq!(positives, DATASET_SIZE / 2);
        let (clf, report) = mlp_train(&ds, &acceptance_training()).expect("training runs");
        pass &= report.heldout_accuracy >= 0.75;
        parts.push(format!(
            "{kind:?} {:.2}% on {} held out ({:.0?})",
            100.0 * report.heldout_accuracy,
            report.heldout_size,
            start.elapsed()
        ));
        if kind == SampleKind::SelfIntersection {
            *self_clf = Some(clf);
        }
    }
    outcome(pass, parts.join("; "))
}

/// Ramp whose bottom boundary is a looped cubic.
fn folded_patch() -> CoonsPatch {
    let mut p = flat_patch();
    for (k, c) in p.control.iter_mut().enumerate() {
        // lift the far edge to make a ramp
        if (6..=9).contains(&k) {
            c.z = 1.0;
        }
    }
    p.control[4].z = 1.0 / 3.0;
    p.control[5].z = 2.0 / 3.0;
    p.control[10].z = 2.0 / 3.0;
    p.control[11].z = 1.0 / 3.0;
    p.control[1] = Vec3::new(2.5, 1.5, 0.0);
    p.control[2] = Vec3::new(-1.5, 1.5, 0.0);
    p
}

fn flat_patch() -> CoonsPatch {
    let c = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    CoonsPatch::new(std::array::from_fn(|k| {
        let (p, q) = (c[k / 3], c[(k / 3 + 1) % 4]);
        let f = (k % 3) as f64 / 3.0;
        Vec3::new(p.0 + (q.0 - p.0) * f, p.1 + (q.1 - p.1) * f, 0.0)
    }))
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        for k in i..=j {
            r[idx[k]] = (i + j) as f64 / 2.0;
        }
        i = j + 1;
    }
    r
}

fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn interpolation_scores(clf: Option<&MlpClassifier>) -> Outcome {
    let Some(f) = clf else {
        return outcome(false, "no self-intersection classifier was trained");
    };
    let (a, b) = (flat_patch(), folded_patch());
    if patch_self_intersects(&a, 64) || !patch_self_intersects(&b, 64) {
        return outcome(false, "interpolation endpoints are mislabeled by the oracle");
    }
    let pair_dummy = random_classifier(72, 0);
    let mut params = Vec::new();
    let mut scores = Vec::new();
    for k in 0..50 {
        let u = k as f64 / 49.0;
        let points: Vec<Vec3> = a.control.iter().zip(&b.control).map(|(p, q)| *p * (1.0 - u) + *q * u).collect();
        let pc = PatchCollection::new(points, vec![PatchTopology::new(std::array::from_fn(|i| i))]).unwrap();
        let (score, _, _) = intersection_losses(&pc, f, &pair_dummy).unwrap();
        params.push(u);
        scores.push(score);
    }
    let rho = spearman(&params, &scores);
    outcome(
        rho > 0.8,
        format!("Spearman {rho:.3}; score {:.3} (flat) to {:.3} (folded)", scores[0], scores[49]),
    )
}

// ---------------------------------------------------------------- 7

fn decay_arithmetic() -> Outcome {
    let s = DecaySchedule::default();
    let got: Vec<f64> = [0, 600, 1200].iter().map(|&t| s.at(t).weight()).collect();
    let expected = [1.0, 0.4, 0.16];
    let pass = (s.gamma, s.period) == (0.4, 600.0)
        && got.iter().zip(&expected).all(|(g, e): (&f64, &f64)| (g - e).abs() <= 2.0 * f64::EPSILON * e);
    outcome(pass, format!("weights {got:?}"))
}

// ---------------------------------------------------------------- 8

fn augmentation_statistics() -> Outcome {
    // long curves so every split attempt lands
    let d = VectorDrawing {
        canvas: Canvas {
            width: 512.0,
            height: 512.0,
        },
        curves: vec![
            vec![[20.0, 20.0], [490.0, 30.0], [480.0, 480.0]],
            vec![[30.0, 490.0], [250.0, 100.0], [470.0, 490.0]],
            vec![[60.0, 60.0], [60.0, 450.0]],
        ],
    };
    let p = AugmentParams::default();
    let runs = 10_000u64;
    let (mut splits, mut endpoints, mut truncated) = (0usize, 0usize, 0usize);
    for seed in 0..runs {
        let (_, r) = augment_contours(&d, &p, seed);
        splits += r.splits;
        endpoints += r.endpoints;
        truncated += r.truncated_endpoints;
    }
    let mean = splits as f64 / runs as f64;
    let rate = truncated as f64 / endpoints as f64;
    outcome(
        (mean - 3.0).abs() <= 0.05 && (rate - 0.2).abs() <= 0.01,
        format!("mean splits {mean:.4}, endpoint truncation rate {rate:.4} over {endpoints} endpoints"),
    )
}

// ---------------------------------------------------------------- 9

/// Edge counts of an OBJ file read independently of the library parser.
fn obj_edge_audit(path: &Path) -> (usize, usize, bool) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let mut faces = 0;
    for line in text.lines() {
        let mut it = line.split_whitespace();
        if it.next() != Some("f") {
            continue;
        }
        let idx: Vec<usize> = it.map(|t| t.split('/').next().unwrap().parse().unwrap()).collect();
        faces += 1;
        for k in 0..idx.len() {
            let (a, b) = (idx[k], idx[(k + 1) % idx.len()]);
            *edges.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let manifold = !edges.is_empty() && edges.values().all(|&c| c == 2);
    (faces, edges.len(), manifold)
}

fn watertight_export() -> Outcome {
    let dir = work_dir().join("tessellate");
    std::fs::create_dir_all(&dir).unwrap();
    // a second closed template: the cube with sheared, bulged points
    let mut warped = build_cube_template(2.0);
    for p in &mut warped.points {
        *p = Vec3::new(p.x + 0.3 * p.z, p.y * (1.0 + 0.2 * p.x), p.z + 0.1 * p.x * p.y);
    }
    warped.name = "warped".into();
    let warped_path = dir.join("warped.json");
    save_template(&warped, &warped_path).unwrap();
    let mut lines = Vec::new();
    let mut pass = true;
    for (spec, stem) in [("builtin:cube", "cube"), (warped_path.to_str().unwrap(), "warped")] {
        for n in [1, 2, 3, 8, 16] {
            let out = dir.join(format!("{stem}-{n}"));
            let status = Command::new(env!("CARGO_BIN_EXE_coonsfit"))
                .args(["--out", out.to_str().unwrap(), "tessellate", "--template", spec, "--n", &n.to_string()])
                .output()
                .unwrap();
            if !status.status.success() {
                pass = false;
                lines.push(format!("{stem} n={n}: exit {}", status.status));
                continue;
            }
            let (faces, edges, manifold) = obj_edge_audit(&out.join(format!("{stem}.obj")));
            // closed genus-0 surface: 3F = 2E
            pass &= manifold && faces == 12 * n * n && 3 * faces == 2 * edges;
            if n == 8 {
                lines.push(format!("{stem} n=8: {faces} faces, {edges} edges"));
            }
        }
    }
    outcome(pass, format!("5 resolutions x 2 templates audited; {}", lines.join(", ")))
}

// ---------------------------------------------------------------- 10

fn monte_carlo_consistency() -> Outcome {
    let template = build_cube_template(1.0);
    let opts = LossOptions::default();
    let gap = |pc: &PatchCollection, target: &TriangleMesh| {
        let index = SpatialIndex::build(sample_surface(target, 200_000, 1).unwrap()).unwrap();
        let subset = sample_surface(target, 5000, 2).unwrap();
        let (low, _) = chamfer_loss(pc, &index, &subset, 10_000, 3, &opts).unwrap();
        let (high, _) = chamfer_loss(pc, &index, &subset, 100_000, 4, &opts).unwrap();
        (low, high, (low - high).abs() / high)
    };
    // start of the scaled-cube fit
    let (low, high, chamfer_gap) = gap(&template.rest_pose(), &TriangleMesh::cuboid(Vec3::splat(-0.75), Vec3::splat(0.75)));
    // near convergence the nearest-sample bias (about area / (pi N)) dominates; reported only
    let pc = template.rest_pose().map_points(|p| Vec3::new(p.x * 1.1, p.y + 0.1 * p.x, p.z * (1.0 + 0.2 * p.y)));
    let (_, _, near_gap) = gap(&pc, &unit_cube_mesh());

    let n = 100_000;
    let points = evaluate(&pc, &draw_params(pc.len(), n, 5));
    let mut sums = vec![(0.0, 0usize); pc.len()];
    for p in &points {
        sums[p.param.patch].0 += p.area();
        sums[p.param.patch].1 += 1;
    }
    let mc_area: f64 = sums.iter().map(|(s, c)| s / *c as f64).sum();
    let mesh_area: f64 = pc.iter_patches().map(|p| tessellate(&p, 128).total_area()).sum();
    let area_gap = (mc_area - mesh_area).abs() / mesh_area;
    outcome(
        chamfer_gap < 0.02 && area_gap < 0.005,
        format!(
            "chamfer {low:.5e} vs {high:.5e} ({:.2}%), near-converged pose {:.2}%; area {mc_area:.5} vs {mesh_area:.5} ({:.3}%)",
            100.0 * chamfer_gap,
            100.0 * near_gap,
            100.0 * area_gap
        ),
    )
}

// ----------------------------------------------------------------

fn main() {
    let mut self_clf = None;
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut run = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let tag = if o.pass { "[PASS]" } else { "[FAIL]" };
        println!("{tag} {name}: {} [{:.1?}]", o.detail, start.elapsed());
        results.push((name, o));
    };
    run("1 gradient finite differences", &mut gradient_suite);
    run("2 cube fit", &mut cube_fit);
    run("3 scaled cube recovery", &mut scaled_cube);
    run("4 intersection oracle", &mut oracle_consistency);
    run("5 intersection classifiers", &mut || classifiers(&mut self_clf));
    let trained = self_clf.take();
    run("6 interpolation score ordering", &mut || interpolation_scores(trained.as_ref()));
    run("7 template decay", &mut decay_arithmetic);
    run("8 augmentation statistics", &mut augmentation_statistics);
    run("9 watertight tessellation", &mut watertight_export);
    run("10 Monte Carlo consistency", &mut monte_carlo_consistency);
    let failed = results.iter().filter(|(_, o)| !o.pass).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
