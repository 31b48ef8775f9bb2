use std::collections::HashMap;

use super::TessellateError;
use crate::geom::{Aabb, Vec3};
use crate::mesh::{weld_points, TriangleMesh};

/// Welds vertices within `tol`, drops triangles that collapse and vertices
/// nothing references.
pub(crate) fn weld_compact(
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    tol: f64,
) -> TriangleMesh {
    let w = weld_points(&vertices, tol);
    let mut used = vec![u32::MAX; w.points.len()];
    let mut out_v = Vec::with_capacity(w.points.len());
    let mut out_t = Vec::with_capacity(triangles.len());
    for t in triangles {
        let m = t.map(|i| w.remap[i as usize]);
        if m[0] == m[1] || m[1] == m[2] || m[0] == m[2] {
            continue;
        }
        out_t.push(m.map(|i| {
            if used[i as usize] == u32::MAX {
                used[i as usize] = out_v.len() as u32;
                out_v.push(w.points[i as usize]);
            }
            used[i as usize]
        }));
    }
    TriangleMesh::new(out_v, out_t, None).expect("welded indices are in range")
}

/// Per-vertex unit normals: incident face normals weighted by the corner angle.
pub(crate) fn vertex_normals(m: &TriangleMesh) -> Vec<Option<Vec3>> {
    let v = m.vertices();
    let mut acc = vec![Vec3::ZERO; v.len()];
    for t in m.triangles() {
        let p = t.map(|i| v[i as usize]);
        let Some(n) = (p[1] - p[0]).cross(p[2] - p[0]).normalized() else {
            continue;
        };
        for k in 0..3 {
            let (a, b) = (p[(k + 1) % 3] - p[k], p[(k + 2) % 3] - p[k]);
            let angle = a.cross(b).norm().atan2(a.dot(b));
            acc[t[k] as usize] += n * angle;
        }
    }
    acc.into_iter().map(|n| n.normalized()).collect()
}

/// Closes an open sheet into a solid of the given thickness.
///
/// The sheet is welded (so seams and collapsed poles join), each vertex is
/// pushed `±thickness / 2` along its normal, the `+` copy keeps the sheet's
/// winding, the `-` copy is reversed, and a wall joins the copies along every
/// boundary edge.
pub fn thicken(
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    thickness: f64,
) -> Result<TriangleMesh, TessellateError> {
    if !(thickness > 0.0 && thickness.is_finite()) {
        return Err(TessellateError::Thickness(thickness));
    }
    let scale = Aabb::from_points(vertices.iter().copied()).map_or(0.0, |b| b.diagonal());
    let base = weld_compact(vertices, triangles, 1e-9 * scale);
    if base.is_empty() {
        return Err(TessellateError::Spec("surface has no area".into()));
    }
    let normals = vertex_normals(&base);
    let nv = base.vertex_count() as u32;
    let half = thickness * 0.5;
    let mut out_v = Vec::with_capacity(2 * nv as usize);
    let mut bottom = Vec::with_capacity(nv as usize);
    for (p, n) in base.vertices().iter().zip(&normals) {
        let n = n.ok_or_else(|| TessellateError::DegenerateNormal { at: p.to_string() })?;
        out_v.push(*p + n * half);
        bottom.push(*p - n * half);
    }
    out_v.extend(bottom);

    let mut uses: HashMap<(u32, u32), u32> = HashMap::with_capacity(base.triangle_count() * 3 / 2);
    for t in base.triangles() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *uses.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut out_t = Vec::with_capacity(base.triangle_count() * 2 + uses.len());
    out_t.extend_from_slice(base.triangles());
    out_t.extend(
        base.triangles()
            .iter()
            .map(|t| [t[0] + nv, t[2] + nv, t[1] + nv]),
    );
    for t in base.triangles() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            if uses[&(a.min(b), a.max(b))] == 1 {
                out_t.push([b, a, a + nv]);
                out_t.push([b, a + nv, b + nv]);
            }
        }
    }
    Ok(TriangleMesh::new(out_v, out_t, None)?)
}
