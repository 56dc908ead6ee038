use proptest::prelude::*;

use coonsfit::augment::{augment_contours, AugmentParams, Canvas, TruncationMode, VectorDrawing};
use coonsfit::intersect::{patch_self_intersects, patches_intersect};
use coonsfit::mesh::{parse_obj, write_obj};
use coonsfit::template::{parse_template, template_to_string};
use coonsfit::{build_cube_template, CoonsPatch, Vec3};

fn point() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn drawing() -> impl Strategy<Value = VectorDrawing> {
    let curve = prop::collection::vec((0.0..400.0f64, 0.0..400.0f64).prop_map(|(x, y)| [x, y]), 2..8);
    prop::collection::vec(curve, 1..6).prop_map(|curves| VectorDrawing {
        canvas: Canvas {
            width: 400.0,
            height: 400.0,
        },
        curves,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn augmentation_bookkeeping(d in drawing(), seed in any::<u64>(), per_curve in any::<bool>(), gap in 0.0..10.0f64) {
        let p = AugmentParams {
            gap,
            truncation_mode: if per_curve { TruncationMode::PerCurve } else { TruncationMode::PerEndpoint },
            ..AugmentParams::default()
        };
        let d = d.sanitized();
        let (out, r) = augment_contours(&d, &p, seed);
        prop_assert_eq!(out.curves.len(), d.curves.len() + r.splits - r.removed);
        let deficit = d.total_length() - out.total_length();
        prop_assert!(deficit >= -1e-9);
        let booked = r.gap_length + r.truncated_length + r.removed_length;
        prop_assert!((deficit - booked).abs() < 1e-7 * d.total_length().max(1.0));
        prop_assert_eq!(out.curves.is_empty(), r.empty);
        prop_assert!(r.truncated_endpoints <= r.endpoints);
    }

    #[test]
    fn template_text_round_trip_is_bit_exact(offsets in prop::collection::vec(point(), 32)) {
        let mut t = build_cube_template(1.3);
        for (p, o) in t.points.iter_mut().zip(&offsets) {
            *p += *o * 0.1 + Vec3::new(1e-17, 0.0, -3.3e-9);
        }
        let back = parse_template(&template_to_string(&t)).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn deformed_cube_stays_watertight(offsets in prop::collection::vec(point(), 32), n in 1usize..6) {
        let mut t = build_cube_template(1.0);
        for (p, o) in t.points.iter_mut().zip(&offsets) {
            *p += *o * 0.2;
        }
        let mesh = t.rest_pose().tessellate(n);
        prop_assert_eq!(mesh.faces.len(), 12 * n * n);
        prop_assert!(mesh.edge_face_counts().values().all(|&c| c == 2));
        // V - E + F = 2
        let e = mesh.edge_face_counts().len() as i64;
        prop_assert_eq!(mesh.vertices.len() as i64 - e + mesh.faces.len() as i64, 2);
    }

    #[test]
    fn obj_round_trip_to_nine_digits(offsets in prop::collection::vec(point(), 32)) {
        let mut t = build_cube_template(2.0);
        for (p, o) in t.points.iter_mut().zip(&offsets) {
            *p += *o * 0.3;
        }
        let mesh = t.rest_pose().tessellate(3);
        let mut buf = Vec::new();
        write_obj(&mesh, &mut buf).unwrap();
        let back = parse_obj(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(&back.faces, &mesh.faces);
        for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
            prop_assert!((*a - *b).norm() <= 1e-8 * b.norm().max(1.0));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_is_symmetric_and_scale_invariant(a in prop::collection::vec(point(), 12), b in prop::collection::vec(point(), 12)) {
        let p = CoonsPatch::new(a.try_into().unwrap());
        let q = CoonsPatch::new(b.try_into().unwrap());
        prop_assert_eq!(patches_intersect(&p, &q, 8), patches_intersect(&q, &p, 8));
        // scaling by two is exact in floating point
        prop_assert_eq!(patch_self_intersects(&p, 8), patch_self_intersects(&p.map_points(|v| v * 2.0), 8));
    }
}
