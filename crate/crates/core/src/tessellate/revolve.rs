use std::f64::consts::TAU;

use crate::geom::Vec3;
use crate::mesh::TriangleMesh;

/// Solid of revolution about the line `origin + s * dir` (`dir` unit).
///
/// `profile` lists `(s, radius)` from one pole to the other; the first and
/// last radii must be zero and the rest positive. Every interior profile point
/// becomes a ring of `n` vertices, counterclockwise around `dir`.
pub(crate) fn revolve(origin: Vec3, dir: Vec3, profile: &[(f64, f64)], n: usize) -> TriangleMesh {
    debug_assert!(profile.len() >= 3);
    debug_assert!(profile[0].1 == 0.0 && profile[profile.len() - 1].1 == 0.0);
    let u = dir.any_perpendicular();
    let w = dir.cross(u);
    let ring_dirs: Vec<Vec3> = (0..n)
        .map(|j| {
            let a = TAU * j as f64 / n as f64;
            u * a.cos() + w * a.sin()
        })
        .collect();

    let last = profile.len() - 1;
    let mut vertices = Vec::with_capacity((profile.len() - 2) * n + 2);
    vertices.push(origin + dir * profile[0].0);
    for &(s, r) in &profile[1..last] {
        let c = origin + dir * s;
        vertices.extend(ring_dirs.iter().map(|&d| c + d * r));
    }
    let top = vertices.len() as u32;
    vertices.push(origin + dir * profile[last].0);

    let ring = |k: usize, j: usize| (1 + (k - 1) * n + j % n) as u32;
    let mut triangles = Vec::with_capacity(2 * n * (profile.len() - 2));
    for j in 0..n {
        triangles.push([0, ring(1, j + 1), ring(1, j)]);
    }
    for k in 1..last - 1 {
        for j in 0..n {
            let (a0, a1) = (ring(k, j), ring(k, j + 1));
            let (b0, b1) = (ring(k + 1, j), ring(k + 1, j + 1));
            triangles.push([a0, a1, b1]);
            triangles.push([a0, b1, b0]);
        }
    }
    for j in 0..n {
        triangles.push([ring(last - 1, j), ring(last - 1, j + 1), top]);
    }
    TriangleMesh::new(vertices, triangles, None).expect("revolved indices are in range")
}
