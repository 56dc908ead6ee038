use std::collections::HashMap;

use crate::vec3::Vec3;

use super::{PatchTopology, Template};

/// Axis-aligned cube of edge length `side` centred at the origin: six
/// patches, twelve shared curves and 32 control points (eight corners plus
/// two points at the thirds of each edge).
///
/// # Panics
/// If `side` is not positive.
pub fn build_cube_template(side: f64) -> Template {
    assert!(side > 0.0, "cube side must be positive");
    let h = side * 0.5;
    let corner_id = |x: i32, y: i32, z: i32| ((x > 0) as usize) | (((y > 0) as usize) << 1) | (((z > 0) as usize) << 2);
    let mut points: Vec<Vec3> = (0..8)
        .map(|c| {
            let sign = |bit: usize| if c & bit != 0 { h } else { -h };
            Vec3::new(sign(1), sign(2), sign(4))
        })
        .collect();

    // (outward normal, u, v) with u x v = normal; the loop runs
    // (-u,-v) -> (+u,-v) -> (+u,+v) -> (-u,+v)
    let faces: [([i32; 3], [i32; 3], [i32; 3]); 6] = [
        ([1, 0, 0], [0, 1, 0], [0, 0, 1]),
        ([-1, 0, 0], [0, 0, 1], [0, 1, 0]),
        ([0, 1, 0], [0, 0, 1], [1, 0, 0]),
        ([0, -1, 0], [1, 0, 0], [0, 0, 1]),
        ([0, 0, 1], [1, 0, 0], [0, 1, 0]),
        ([0, 0, -1], [0, 1, 0], [1, 0, 0]),
    ];

    let mut edge_points: HashMap<(usize, usize), [usize; 2]> = HashMap::new();
    let mut patches = Vec::with_capacity(6);
    for (n, u, v) in faces {
        let corner = |a: i32, b: i32| {
            let c: [i32; 3] = std::array::from_fn(|k| n[k] + a * u[k] + b * v[k]);
            corner_id(c[0], c[1], c[2])
        };
        let loop_corners = [corner(-1, -1), corner(1, -1), corner(1, 1), corner(-1, 1)];
        let mut indices = [0usize; 12];
        for k in 0..4 {
            let (a, b) = (loop_corners[k], loop_corners[(k + 1) % 4]);
            let key = (a.min(b), a.max(b));
            let pair = *edge_points.entry(key).or_insert_with(|| {
                let (pa, pb) = (points[key.0], points[key.1]);
                let first = points.len();
                points.push(pa + (pb - pa) / 3.0);
                points.push(pa + (pb - pa) * (2.0 / 3.0));
                [first, first + 1]
            });
            let (near_a, near_b) = if a == key.0 { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
            indices[3 * k] = a;
            indices[3 * k + 1] = near_a;
            indices[3 * k + 2] = near_b;
        }
        patches.push(PatchTopology::new(indices));
    }
    Template::new("cube", points, patches)
}
