use std::collections::HashMap;

use serde::Serialize;

use super::weld::weld_points;
use super::TriangleMesh;
use crate::geom::{Aabb, Vec3};

/// Printability report for a mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Every undirected edge is shared by exactly two triangles.
    pub watertight: bool,
    /// Every shared edge is traversed once in each direction.
    pub orientation_consistent: bool,
    pub euler_characteristic: i64,
    pub connected_components: usize,
    pub boundary_edge_count: usize,
    pub nonmanifold_edge_count: usize,
    pub degenerate_triangle_count: usize,
    pub duplicate_vertex_pairs: usize,
    pub min_triangle_area: f64,
    pub triangle_count: usize,
    /// First few boundary edges, for diagnostics.
    #[serde(skip)]
    pub boundary_edges: Vec<[Vec3; 2]>,
}

impl ValidationReport {
    /// Watertight with consistent orientation: what a slicer needs.
    pub fn is_printable(&self) -> bool {
        self.watertight && self.orientation_consistent
    }
}

const BOUNDARY_SAMPLE: usize = 10;

/// Weld tolerance used when none is given: 1e-9 of the bounding-box diagonal.
pub fn default_weld_tolerance(m: &TriangleMesh) -> f64 {
    Aabb::from_points(m.vertices().iter().copied()).map_or(0.0, |b| 1e-9 * b.diagonal())
}

#[derive(Default, Clone, Copy)]
struct EdgeUse {
    forward: u32,
    backward: u32,
}

/// Checks watertightness, orientation and topology after welding vertices
/// closer than `weld_tolerance`. A negative tolerance skips welding, so parts
/// that merely touch count as separate components.
pub fn validate(m: &TriangleMesh, weld_tolerance: f64) -> ValidationReport {
    let welded = weld_points(m.vertices(), weld_tolerance);
    let diag = Aabb::from_points(m.vertices().iter().copied()).map_or(0.0, |b| b.diagonal());
    let area_floor = 1e-14 * diag * diag;

    let mut degenerate = 0;
    let mut min_area = f64::INFINITY;
    let mut faces: Vec<[u32; 3]> = Vec::with_capacity(m.triangle_count());
    for (t, tri) in m.triangles().iter().enumerate() {
        let area = m.triangle_area(t);
        min_area = min_area.min(area);
        let w = tri.map(|i| welded.remap[i as usize]);
        if w[0] == w[1] || w[1] == w[2] || w[0] == w[2] {
            degenerate += 1;
            continue;
        }
        if area < area_floor {
            degenerate += 1;
        }
        faces.push(w);
    }

    let mut edges: HashMap<(u32, u32), EdgeUse> = HashMap::with_capacity(faces.len() * 3 / 2);
    let mut order: Vec<(u32, u32)> = Vec::new();
    for f in &faces {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            let e = edges.entry(key).or_insert_with(|| {
                order.push(key);
                EdgeUse::default()
            });
            if a < b {
                e.forward += 1;
            } else {
                e.backward += 1;
            }
        }
    }

    let mut boundary = 0;
    let mut nonmanifold = 0;
    let mut consistent = true;
    let mut boundary_edges = Vec::new();
    for key in &order {
        let e = edges[key];
        match e.forward + e.backward {
            1 => {
                boundary += 1;
                if boundary_edges.len() < BOUNDARY_SAMPLE {
                    boundary_edges
                        .push([welded.points[key.0 as usize], welded.points[key.1 as usize]]);
                }
            }
            2 => {}
            _ => nonmanifold += 1,
        }
        if e.forward > 1 || e.backward > 1 {
            consistent = false;
        }
    }

    // union-find over welded vertices used by faces
    let mut parent: Vec<u32> = (0..welded.points.len() as u32).collect();
    fn find(p: &mut [u32], mut x: u32) -> u32 {
        while p[x as usize] != x {
            p[x as usize] = p[p[x as usize] as usize];
            x = p[x as usize];
        }
        x
    }
    let mut used = vec![false; welded.points.len()];
    for f in &faces {
        for &v in f {
            used[v as usize] = true;
        }
        let r0 = find(&mut parent, f[0]);
        for &v in &f[1..] {
            let r = find(&mut parent, v);
            if r != r0 {
                parent[r as usize] = r0;
            }
        }
    }
    let vertex_count = used.iter().filter(|u| **u).count();
    let mut roots: Vec<u32> = (0..welded.points.len() as u32)
        .filter(|&v| used[v as usize])
        .map(|v| find(&mut parent, v))
        .collect();
    roots.sort_unstable();
    roots.dedup();

    ValidationReport {
        watertight: !faces.is_empty() && boundary == 0 && nonmanifold == 0,
        orientation_consistent: consistent,
        euler_characteristic: vertex_count as i64 - edges.len() as i64 + faces.len() as i64,
        connected_components: roots.len(),
        boundary_edge_count: boundary,
        nonmanifold_edge_count: nonmanifold,
        degenerate_triangle_count: degenerate,
        duplicate_vertex_pairs: m.vertex_count() - welded.points.len(),
        min_triangle_area: if min_area.is_finite() { min_area } else { 0.0 },
        triangle_count: m.triangle_count(),
        boundary_edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::unit_cube;

    #[test]
    fn cube_is_closed() {
        let r = validate(&unit_cube(), 0.0);
        assert!(r.watertight && r.orientation_consistent);
        assert_eq!(r.euler_characteristic, 2);
        assert_eq!(r.connected_components, 1);
        assert_eq!(r.boundary_edge_count, 0);
        assert_eq!(r.degenerate_triangle_count, 0);
        assert_eq!(r.min_triangle_area, 0.5);
    }

    #[test]
    fn single_triangle_is_open() {
        let m =
            TriangleMesh::new(vec![Vec3::ZERO, Vec3::X, Vec3::Y], vec![[0, 1, 2]], None).unwrap();
        let r = validate(&m, 0.0);
        assert!(!r.watertight);
        assert!(r.orientation_consistent);
        assert_eq!(r.boundary_edge_count, 3);
        assert_eq!(r.boundary_edges.len(), 3);
        assert_eq!(r.euler_characteristic, 1);
    }

    #[test]
    fn flipped_face_breaks_orientation() {
        let (v, mut t, _) = unit_cube().into_parts();
        t[0].swap(1, 2);
        let r = validate(&TriangleMesh::new(v, t, None).unwrap(), 0.0);
        assert!(r.watertight);
        assert!(!r.orientation_consistent);
    }

    #[test]
    fn welding_joins_split_vertices() {
        // a cube whose triangles each own their corners (STL-style soup)
        let cube = unit_cube();
        let mut v = Vec::new();
        let mut t = Vec::new();
        for i in 0..cube.triangle_count() {
            let base = v.len() as u32;
            v.extend(cube.triangle(i));
            t.push([base, base + 1, base + 2]);
        }
        let soup = TriangleMesh::new(v, t, None).unwrap();
        let r = validate(&soup, 1e-9);
        assert!(r.watertight && r.orientation_consistent);
        assert_eq!(r.duplicate_vertex_pairs, 36 - 8);
        assert_eq!(r.euler_characteristic, 2);
    }
}
