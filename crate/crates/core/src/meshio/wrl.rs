use std::fmt::Write;
use std::path::Path;

use super::{fmt_g9, write_file, MeshIoError, GENERATOR};
use crate::mesh::TriangleMesh;

/// VRML97 with a single `IndexedFaceSet` colored per vertex.
pub fn wrl_text(m: &TriangleMesh) -> Result<String, MeshIoError> {
    let colors = m.colors().ok_or(MeshIoError::MissingColors("WRL"))?;
    if m.is_empty() {
        return Err(MeshIoError::Empty);
    }
    let g = |x: f64| fmt_g9(x as f32 as f64);
    let mut s = format!("#VRML V2.0 utf8\n# {GENERATOR}\nShape {{\n  geometry IndexedFaceSet {{\n    solid TRUE\n    ccw TRUE\n");
    s.push_str("    coord Coordinate {\n      point [\n");
    for p in m.vertices() {
        let _ = writeln!(s, "        {} {} {},", g(p.x), g(p.y), g(p.z));
    }
    s.push_str("      ]\n    }\n    color Color {\n      color [\n");
    for c in colors {
        let [r, gr, b] = c.to_bytes();
        let ch = |v: u8| fmt_g9(v as f64 / 255.0);
        let _ = writeln!(s, "        {} {} {},", ch(r), ch(gr), ch(b));
    }
    s.push_str("      ]\n    }\n    colorPerVertex TRUE\n    coordIndex [\n");
    for t in m.triangles() {
        let _ = writeln!(s, "      {} {} {} -1,", t[0], t[1], t[2]);
    }
    s.push_str("    ]\n  }\n}\n");
    Ok(s)
}

pub fn write_wrl(m: &TriangleMesh, path: &Path) -> Result<(), MeshIoError> {
    write_file(path, wrl_text(m)?.as_bytes())
}
