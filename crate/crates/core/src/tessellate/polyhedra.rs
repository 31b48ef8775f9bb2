use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::geom::Vec3;
use crate::mesh::TriangleMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolyhedronName {
    Tetrahedron,
    Cube,
    Octahedron,
    Icosahedron,
    Dodecahedron,
}

impl PolyhedronName {
    pub const ALL: [PolyhedronName; 5] = [
        PolyhedronName::Tetrahedron,
        PolyhedronName::Cube,
        PolyhedronName::Octahedron,
        PolyhedronName::Icosahedron,
        PolyhedronName::Dodecahedron,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolyhedronName::Tetrahedron => "tetrahedron",
            PolyhedronName::Cube => "cube",
            PolyhedronName::Octahedron => "octahedron",
            PolyhedronName::Icosahedron => "icosahedron",
            PolyhedronName::Dodecahedron => "dodecahedron",
        }
    }
}

impl fmt::Display for PolyhedronName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolyhedronName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        PolyhedronName::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown polyhedron '{s}' (expected one of tetrahedron, cube, octahedron, icosahedron, dodecahedron)"))
    }
}

const PHI: f64 = 1.618_033_988_749_895;

fn signs(v: [f64; 3]) -> Vec<Vec3> {
    let mut out = Vec::new();
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                let p = Vec3::new(v[0] * sx, v[1] * sy, v[2] * sz);
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn cyclic(v: [f64; 3]) -> Vec<Vec3> {
    let mut out = signs(v);
    out.extend(signs([v[2], v[0], v[1]]));
    out.extend(signs([v[1], v[2], v[0]]));
    out
}

/// Cyclic permutations of `(0, ±1, ±φ)`; edge length 2.
pub(crate) fn icosahedron_vertices() -> Vec<Vec3> {
    cyclic([0.0, 1.0, PHI])
}

fn vertices(name: PolyhedronName) -> Vec<Vec3> {
    match name {
        PolyhedronName::Tetrahedron => vec![
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, -1.0, -1.0),
            Vec3::new(-1.0, 1.0, -1.0),
            Vec3::new(-1.0, -1.0, 1.0),
        ],
        PolyhedronName::Cube => signs([1.0, 1.0, 1.0]),
        PolyhedronName::Octahedron => cyclic([1.0, 0.0, 0.0]),
        PolyhedronName::Icosahedron => icosahedron_vertices(),
        PolyhedronName::Dodecahedron => {
            let mut v = signs([1.0, 1.0, 1.0]);
            v.extend(cyclic([0.0, 1.0 / PHI, PHI]));
            v
        }
    }
}

/// Faces of the convex hull of `points` (all of which must be hull
/// vertices), each listed counterclockwise seen from outside.
pub(crate) fn hull_faces(points: &[Vec3]) -> Vec<Vec<u32>> {
    let n = points.len();
    let c = points.iter().fold(Vec3::ZERO, |a, &p| a + p) / n as f64;
    let scale = points.iter().map(|p| (*p - c).norm()).fold(0.0, f64::max);
    let eps = 1e-9 * scale;
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut faces = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some(mut normal) = (points[j] - points[i])
                    .cross(points[k] - points[i])
                    .normalized()
                else {
                    continue;
                };
                if normal.dot(points[i] - c) < 0.0 {
                    normal = -normal;
                }
                let d = normal.dot(points[i]);
                if points.iter().any(|p| normal.dot(*p) > d + eps) {
                    continue;
                }
                let on: Vec<u32> = (0..n as u32)
                    .filter(|&l| (normal.dot(points[l as usize]) - d).abs() <= eps)
                    .collect();
                if !seen.insert(on.clone()) {
                    continue;
                }
                let fc =
                    on.iter().fold(Vec3::ZERO, |a, &l| a + points[l as usize]) / on.len() as f64;
                let u = (points[on[0] as usize] - fc)
                    .normalized()
                    .expect("face vertex off center");
                let w = normal.cross(u);
                let mut ring: Vec<(f64, u32)> = on
                    .iter()
                    .map(|&l| {
                        let r = points[l as usize] - fc;
                        (r.dot(w).atan2(r.dot(u)), l)
                    })
                    .collect();
                ring.sort_by(|a, b| a.0.total_cmp(&b.0));
                faces.push(ring.into_iter().map(|(_, l)| l).collect());
            }
        }
    }
    faces
}

/// Fan triangulation of the hull faces.
pub(crate) fn hull_triangles(points: &[Vec3]) -> Vec<[u32; 3]> {
    hull_faces(points)
        .iter()
        .flat_map(|f| (1..f.len() - 1).map(move |i| [f[0], f[i], f[i + 1]]))
        .collect()
}

/// Exact Platonic solid centered at the origin with the given edge length;
/// polygon faces are fan-triangulated.
pub fn polyhedron(name: PolyhedronName, edge_length: f64) -> TriangleMesh {
    let v = vertices(name);
    let mut native = f64::INFINITY;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            native = native.min((v[i] - v[j]).norm());
        }
    }
    let s = edge_length / native;
    let triangles = hull_triangles(&v);
    TriangleMesh::new(v.into_iter().map(|p| p * s).collect(), triangles, None)
        .expect("hull indices are in range")
}
