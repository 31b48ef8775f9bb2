use std::path::Path;

use super::{write_file, MeshIoError, GENERATOR};
use crate::mesh::TriangleMesh;

/// Binary little-endian PLY: float `x y z` and uchar `red green blue` per
/// vertex, a uchar-counted int list per face.
pub fn ply_bytes(m: &TriangleMesh) -> Result<Vec<u8>, MeshIoError> {
    let colors = m.colors().ok_or(MeshIoError::MissingColors("PLY"))?;
    if m.is_empty() {
        return Err(MeshIoError::Empty);
    }
    let header = format!(
        "ply\nformat binary_little_endian 1.0\ncomment {GENERATOR}\nelement vertex {}\n\
         property float x\nproperty float y\nproperty float z\n\
         property uchar red\nproperty uchar green\nproperty uchar blue\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        m.vertex_count(),
        m.triangle_count()
    );
    let mut out = header.into_bytes();
    out.reserve(15 * m.vertex_count() + 13 * m.triangle_count());
    for (p, c) in m.vertices().iter().zip(colors) {
        for x in [p.x, p.y, p.z] {
            out.extend_from_slice(&(x as f32).to_le_bytes());
        }
        out.extend_from_slice(&c.to_bytes());
    }
    for t in m.triangles() {
        out.push(3);
        for &i in t {
            out.extend_from_slice(&(i as i32).to_le_bytes());
        }
    }
    Ok(out)
}

pub fn write_ply(m: &TriangleMesh, path: &Path) -> Result<(), MeshIoError> {
    write_file(path, &ply_bytes(m)?)
}
