use super::query::{bounds, centroid};
use super::{MeshError, Rgb, TriangleMesh};
use crate::geom::{translation, AffineTransform, GeomError, Vec3};

/// Maps every vertex through `t`. Mirror transforms (negative determinant)
/// flip the winding so normals keep pointing outward.
pub fn apply_transform(m: &TriangleMesh, t: &AffineTransform) -> Result<TriangleMesh, MeshError> {
    let det = t.determinant();
    if det == 0.0 || !det.is_finite() {
        return Err(GeomError::Singular { det }.into());
    }
    let vertices = m.vertices().iter().map(|&p| t.apply(p)).collect();
    let mut triangles = m.triangles().to_vec();
    if det < 0.0 {
        for tri in &mut triangles {
            tri.swap(1, 2);
        }
    }
    TriangleMesh::new(vertices, triangles, m.colors().map(|c| c.to_vec()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResizeTarget {
    /// Uniform scale giving this x-extent; box ratios are kept.
    Width(f64),
    /// Per-axis scale giving exactly these extents.
    Box(Vec3),
}

/// Scales about the bounding box's min corner to hit `target` extents.
pub fn resize(m: &TriangleMesh, target: ResizeTarget) -> Result<TriangleMesh, MeshError> {
    let b = bounds(m)?;
    let ext = b.extent();
    let check = |axis: char, value: f64| {
        if value > 0.0 && value.is_finite() {
            Ok(())
        } else {
            Err(MeshError::BadTarget { axis, value })
        }
    };
    let factors = match target {
        ResizeTarget::Width(w) => {
            check('x', w)?;
            if ext.x == 0.0 {
                return Err(MeshError::ZeroExtent { axis: 'x' });
            }
            Vec3::splat(w / ext.x)
        }
        ResizeTarget::Box(size) => {
            let mut f = [0.0; 3];
            for (i, axis) in ['x', 'y', 'z'].into_iter().enumerate() {
                check(axis, size[i])?;
                if ext[i] == 0.0 {
                    return Err(MeshError::ZeroExtent { axis });
                }
                f[i] = size[i] / ext[i];
            }
            Vec3::from(f)
        }
    };
    // Scale offsets from the min corner directly instead of going through a
    // matrix so the max corner lands on min + target with one rounding.
    let vertices = m
        .vertices()
        .iter()
        .map(|&p| b.min + (p - b.min).mul_elem(factors))
        .collect();
    TriangleMesh::new(
        vertices,
        m.triangles().to_vec(),
        m.colors().map(|c| c.to_vec()),
    )
}

/// Translates the mesh so its centroid sits at the origin.
pub fn center_at_origin(m: &TriangleMesh) -> Result<TriangleMesh, MeshError> {
    let c = centroid(m)?;
    apply_transform(m, &translation(-c.point))
}

/// Concatenates meshes, offsetting indices. With `colors`, mesh `i` is painted
/// `colors[i]`; without, existing per-vertex colors survive only if every
/// part has them.
pub fn merge(meshes: &[TriangleMesh], colors: Option<&[Rgb]>) -> Result<TriangleMesh, MeshError> {
    merge_with_stats(meshes, colors).map(|(m, _)| m)
}

/// Like [`merge`], also returning how many degenerate triangles (area below
/// 1e-14 of the squared box diagonal) were dropped.
pub fn merge_with_stats(
    meshes: &[TriangleMesh],
    colors: Option<&[Rgb]>,
) -> Result<(TriangleMesh, usize), MeshError> {
    if let Some(c) = colors {
        if c.len() != meshes.len() {
            return Err(MeshError::ColorListLength {
                colors: c.len(),
                meshes: meshes.len(),
            });
        }
    }
    let total_v: usize = meshes.iter().map(|m| m.vertex_count()).sum();
    let total_t: usize = meshes.iter().map(|m| m.triangle_count()).sum();
    let keep_colors =
        colors.is_some() || (!meshes.is_empty() && meshes.iter().all(|m| m.colors().is_some()));

    let all_bounds = meshes
        .iter()
        .filter_map(|m| bounds(m).ok())
        .reduce(|a, b| a.union(&b));
    let floor = all_bounds.map_or(0.0, |b| 1e-14 * b.diagonal() * b.diagonal());

    let mut vertices = Vec::with_capacity(total_v);
    let mut triangles = Vec::with_capacity(total_t);
    let mut out_colors = Vec::with_capacity(if keep_colors { total_v } else { 0 });
    let mut dropped = 0;
    for (i, m) in meshes.iter().enumerate() {
        let offset = vertices.len() as u32;
        vertices.extend_from_slice(m.vertices());
        for t in 0..m.triangle_count() {
            if m.triangle_area(t) < floor {
                dropped += 1;
                continue;
            }
            triangles.push(m.triangles()[t].map(|k| k + offset));
        }
        if keep_colors {
            match (colors, m.colors()) {
                (Some(c), _) => out_colors.extend(std::iter::repeat_n(c[i], m.vertex_count())),
                (None, Some(c)) => out_colors.extend_from_slice(c),
                (None, None) => unreachable!(),
            }
        }
    }
    let mesh = TriangleMesh::new(vertices, triangles, keep_colors.then_some(out_colors))?;
    Ok((mesh, dropped))
}
