use std::collections::HashMap;

use rayon::prelude::*;

use super::{primitive, PrimitiveSpec, QualityParams, TessellateError};
use crate::geom::Vec3;
use crate::mesh::{merge, TriangleMesh};

/// Balls at the vertices and rods along the edges, merged without a union.
#[derive(Debug, Clone, PartialEq)]
pub struct Wireframe {
    pub mesh: TriangleMesh,
    pub spheres: usize,
    pub cylinders: usize,
}

/// Edges of the polygons a mesh was triangulated from: triangle edges whose
/// two faces are not coplanar, plus boundary edges. Returns the vertices those
/// edges use and the edges as point pairs.
pub fn polygon_edges(m: &TriangleMesh) -> (Vec<Vec3>, Vec<[Vec3; 2]>) {
    let v = m.vertices();
    let normals: Vec<Option<Vec3>> = (0..m.triangle_count())
        .map(|t| {
            let [a, b, c] = m.triangle(t);
            (b - a).cross(c - a).normalized()
        })
        .collect();
    let mut faces: HashMap<(u32, u32), Vec<usize>> = HashMap::new();
    let mut order = Vec::new();
    for (t, tri) in m.triangles().iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            faces
                .entry(key)
                .or_insert_with(|| {
                    order.push(key);
                    Vec::new()
                })
                .push(t);
        }
    }
    let mut used = Vec::new();
    let mut seen = vec![false; v.len()];
    let mut edges = Vec::new();
    for key in order {
        let f = &faces[&key];
        let flat = f.len() == 2
            && matches!((normals[f[0]], normals[f[1]]), (Some(n0), Some(n1)) if n0.dot(n1) > 1.0 - 1e-9);
        if flat {
            continue;
        }
        for i in [key.0, key.1] {
            if !seen[i as usize] {
                seen[i as usize] = true;
                used.push(v[i as usize]);
            }
        }
        edges.push([v[key.0 as usize], v[key.1 as usize]]);
    }
    (used, edges)
}

/// One sphere of radius `thickness` per vertex and one capped cylinder of the
/// same radius per edge. The spheres fill the gaps where rods meet.
pub fn wireframe(
    vertices: &[Vec3],
    edges: &[[Vec3; 2]],
    thickness: f64,
    q: &QualityParams,
) -> Result<Wireframe, TessellateError> {
    if !(thickness > 0.0 && thickness.is_finite()) {
        return Err(TessellateError::Thickness(thickness));
    }
    if let Some(index) = edges.iter().position(|e| e[0] == e[1]) {
        return Err(TessellateError::ZeroLengthEdge { index });
    }
    let balls: Vec<TriangleMesh> = vertices
        .par_iter()
        .map(|&c| {
            primitive(
                &PrimitiveSpec::Sphere {
                    center: c,
                    radius: thickness,
                },
                q,
            )
        })
        .collect::<Result<_, _>>()?;
    let rods: Vec<TriangleMesh> = edges
        .par_iter()
        .map(|e| {
            primitive(
                &PrimitiveSpec::Cylinder {
                    p1: e[0],
                    p2: e[1],
                    radius: thickness,
                },
                q,
            )
        })
        .collect::<Result<_, _>>()?;
    let (spheres, cylinders) = (balls.len(), rods.len());
    let parts: Vec<TriangleMesh> = balls.into_iter().chain(rods).collect();
    Ok(Wireframe {
        mesh: merge(&parts, None)?,
        spheres,
        cylinders,
    })
}
