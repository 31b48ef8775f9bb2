use std::collections::HashSet;

use serde::Serialize;

use super::validate::{default_weld_tolerance, validate};
use super::{MeshError, TriangleMesh};
use crate::geom::{Aabb, Vec3};

/// Componentwise min/max over the vertices.
pub fn bounds(m: &TriangleMesh) -> Result<Aabb, MeshError> {
    Aabb::from_points(m.vertices().iter().copied()).ok_or(MeshError::Empty)
}

/// Sum in a fixed binary-tree order, so the result does not depend on how the
/// work was chunked.
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

fn pairwise_sum_vec(xs: &[Vec3]) -> Vec3 {
    if xs.len() <= 8 {
        return xs.iter().fold(Vec3::ZERO, |a, &b| a + b);
    }
    let mid = xs.len() / 2;
    pairwise_sum_vec(&xs[..mid]) + pairwise_sum_vec(&xs[mid..])
}

fn reference_point(m: &TriangleMesh) -> Vec3 {
    bounds(m).map_or(Vec3::ZERO, |b| b.center())
}

/// Signed volume by the divergence theorem without checking closure.
/// Tetrahedra are formed against the box center to limit cancellation.
pub fn enclosed_volume(m: &TriangleMesh) -> f64 {
    let o = reference_point(m);
    let dets: Vec<f64> = (0..m.triangle_count())
        .map(|t| {
            let [a, b, c] = m.triangle(t);
            (a - o).dot((b - o).cross(c - o))
        })
        .collect();
    pairwise_sum(&dets) / 6.0
}

/// Enclosed volume of a closed, consistently oriented mesh; positive for
/// outward winding.
pub fn signed_volume(m: &TriangleMesh) -> Result<f64, MeshError> {
    if m.is_empty() {
        return Err(MeshError::Empty);
    }
    let r = validate(m, default_weld_tolerance(m));
    if !r.is_printable() {
        return Err(MeshError::NotClosed {
            boundary: r.boundary_edge_count,
            nonmanifold: r.nonmanifold_edge_count,
            consistent: r.orientation_consistent,
        });
    }
    Ok(enclosed_volume(m))
}

pub fn surface_area(m: &TriangleMesh) -> f64 {
    let areas: Vec<f64> = (0..m.triangle_count())
        .map(|t| m.triangle_area(t))
        .collect();
    pairwise_sum(&areas)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CentroidKind {
    /// Centroid of the enclosed solid.
    Volume,
    /// Area-weighted centroid of the surface; used when the mesh is not closed.
    SurfaceFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Centroid {
    pub point: Vec3,
    pub kind: CentroidKind,
}

/// Solid centroid for closed meshes; open meshes fall back to the surface
/// centroid and say so in `kind`.
pub fn centroid(m: &TriangleMesh) -> Result<Centroid, MeshError> {
    if m.is_empty() {
        return Err(MeshError::Empty);
    }
    let o = reference_point(m);
    let r = validate(m, default_weld_tolerance(m));
    if r.is_printable() {
        let n = m.triangle_count();
        let mut vols = Vec::with_capacity(n);
        let mut moments = Vec::with_capacity(n);
        for t in 0..n {
            let [a, b, c] = m.triangle(t).map(|p| p - o);
            let v = a.dot(b.cross(c)) / 6.0;
            vols.push(v);
            // tetrahedron (o, a, b, c) has centroid (a + b + c) / 4 relative to o
            moments.push((a + b + c) * (v / 4.0));
        }
        let vol = pairwise_sum(&vols);
        if vol.abs() <= f64::EPSILON * bounds(m)?.diagonal().powi(3) {
            return Err(MeshError::ZeroVolume);
        }
        let point = o + pairwise_sum_vec(&moments) / vol;
        return Ok(Centroid {
            point,
            kind: CentroidKind::Volume,
        });
    }
    let n = m.triangle_count();
    let mut areas = Vec::with_capacity(n);
    let mut moments = Vec::with_capacity(n);
    for t in 0..n {
        let [a, b, c] = m.triangle(t).map(|p| p - o);
        let area = 0.5 * (b - a).cross(c - a).norm();
        areas.push(area);
        moments.push((a + b + c) * (area / 3.0));
    }
    let total = pairwise_sum(&areas);
    if total == 0.0 {
        return Err(MeshError::ZeroVolume);
    }
    Ok(Centroid {
        point: o + pairwise_sum_vec(&moments) / total,
        kind: CentroidKind::SurfaceFallback,
    })
}

/// Mesh elements of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum Extracted {
    Points(Vec<Vec3>),
    Segments(Vec<[Vec3; 2]>),
    Triangles(Vec<[Vec3; 3]>),
}

impl Extracted {
    pub fn len(&self) -> usize {
        match self {
            Extracted::Points(v) => v.len(),
            Extracted::Segments(v) => v.len(),
            Extracted::Triangles(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Unique vertices (dim 0), unique undirected edges (dim 1) or triangles
/// (dim 2), in first-occurrence order. Any other `dim` yields nothing.
pub fn extract(m: &TriangleMesh, dim: u8) -> Extracted {
    match dim {
        0 => {
            let mut seen = HashSet::new();
            let mut pts = Vec::new();
            for &v in m.vertices() {
                if seen.insert(v.to_array().map(|c| if c == 0.0 { 0 } else { c.to_bits() })) {
                    pts.push(v);
                }
            }
            Extracted::Points(pts)
        }
        1 => {
            let mut seen = HashSet::new();
            let mut segs = Vec::new();
            for tri in m.triangles() {
                for k in 0..3 {
                    let (a, b) = (tri[k], tri[(k + 1) % 3]);
                    if seen.insert((a.min(b), a.max(b))) {
                        segs.push([m.vertices()[a as usize], m.vertices()[b as usize]]);
                    }
                }
            }
            Extracted::Segments(segs)
        }
        2 => Extracted::Triangles((0..m.triangle_count()).map(|t| m.triangle(t)).collect()),
        _ => Extracted::Points(Vec::new()),
    }
}
