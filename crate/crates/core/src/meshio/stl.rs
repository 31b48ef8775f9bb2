use std::path::Path;

use super::{fmt_g9, read_file, write_file, MeshIoError, GENERATOR};
use crate::geom::{Aabb, Vec3};
use crate::mesh::{weld_points, TriangleMesh};

const HEADER: usize = 80;
const FACET: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StlFormat {
    Binary,
    Ascii,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StlFacet {
    pub normal: [f32; 3],
    pub vertices: [[f32; 3]; 3],
    pub attribute: u16,
}

/// An STL file as stored: facets keep their normals verbatim.
#[derive(Debug, Clone, PartialEq)]
pub struct StlDocument {
    pub format: StlFormat,
    /// The 80-byte header of a binary file, or the solid name of an ASCII one.
    pub header: Vec<u8>,
    pub facets: Vec<StlFacet>,
}

fn to_f32(p: Vec3) -> [f32; 3] {
    [p.x as f32, p.y as f32, p.z as f32]
}

fn to_vec3(p: [f32; 3]) -> Vec3 {
    Vec3::new(p[0] as f64, p[1] as f64, p[2] as f64)
}

impl StlDocument {
    /// Facets of `m` with normals recomputed from the `f32` corners.
    pub fn from_mesh(m: &TriangleMesh, format: StlFormat) -> Result<Self, MeshIoError> {
        if m.is_empty() {
            return Err(MeshIoError::Empty);
        }
        let facets = (0..m.triangle_count())
            .map(|t| {
                let vertices = m.triangle(t).map(to_f32);
                let [a, b, c] = vertices.map(to_vec3);
                let normal = (b - a).cross(c - a).normalized().map_or([0.0; 3], to_f32);
                StlFacet {
                    normal,
                    vertices,
                    attribute: 0,
                }
            })
            .collect();
        let header = match format {
            StlFormat::Binary => {
                let mut h = GENERATOR.as_bytes().to_vec();
                h.resize(HEADER, 0);
                h
            }
            StlFormat::Ascii => b"mathsculpt".to_vec(),
        };
        Ok(StlDocument {
            format,
            header,
            facets,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self.format {
            StlFormat::Binary => self.binary(),
            StlFormat::Ascii => self.ascii().into_bytes(),
        }
    }

    fn binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER + 4 + FACET * self.facets.len());
        let mut header = self.header.clone();
        header.resize(HEADER, 0);
        out.extend_from_slice(&header);
        out.extend_from_slice(&(self.facets.len() as u32).to_le_bytes());
        for f in &self.facets {
            for x in f.normal.iter().chain(f.vertices.iter().flatten()) {
                out.extend_from_slice(&x.to_le_bytes());
            }
            out.extend_from_slice(&f.attribute.to_le_bytes());
        }
        out
    }

    fn ascii(&self) -> String {
        use std::fmt::Write;
        let name = String::from_utf8_lossy(&self.header);
        let g = |v: [f32; 3]| {
            format!(
                "{} {} {}",
                fmt_g9(v[0] as f64),
                fmt_g9(v[1] as f64),
                fmt_g9(v[2] as f64)
            )
        };
        let mut s = format!("solid {name}\n");
        for f in &self.facets {
            let _ = writeln!(s, "  facet normal {}", g(f.normal));
            s.push_str("    outer loop\n");
            for v in f.vertices {
                let _ = writeln!(s, "      vertex {}", g(v));
            }
            s.push_str("    endloop\n  endfacet\n");
        }
        let _ = writeln!(s, "endsolid {name}");
        s
    }

    /// Indexed mesh: corners within 1e-9 of the bounding-box diagonal are
    /// welded and facets that collapse are dropped.
    pub fn to_mesh(&self) -> Result<TriangleMesh, MeshIoError> {
        if self.facets.is_empty() {
            return Err(MeshIoError::Empty);
        }
        let corners: Vec<Vec3> = self
            .facets
            .iter()
            .flat_map(|f| f.vertices.map(to_vec3))
            .collect();
        let tol = Aabb::from_points(corners.iter().copied()).map_or(0.0, |b| 1e-9 * b.diagonal());
        let w = weld_points(&corners, tol);
        let triangles: Vec<[u32; 3]> = w
            .remap
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
            .filter(|t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
            .collect();
        Ok(TriangleMesh::new(w.points, triangles, None)?)
    }
}

pub fn stl_bytes(m: &TriangleMesh, format: StlFormat) -> Result<Vec<u8>, MeshIoError> {
    Ok(StlDocument::from_mesh(m, format)?.to_bytes())
}

pub fn write_stl(m: &TriangleMesh, path: &Path, format: StlFormat) -> Result<(), MeshIoError> {
    write_file(path, &stl_bytes(m, format)?)
}

/// Reads an STL file into a welded mesh. Colors are never read.
pub fn read_stl(path: &Path) -> Result<TriangleMesh, MeshIoError> {
    parse_stl(&read_file(path)?)?.to_mesh()
}

/// Parses either flavour of STL.
///
/// A file is binary when its length is exactly what the facet count at byte
/// 80 implies, even if its header starts with `solid`. Otherwise it must be
/// ASCII text starting with `solid`.
pub fn parse_stl(bytes: &[u8]) -> Result<StlDocument, MeshIoError> {
    let looks_ascii = {
        let start = bytes
            .iter()
            .position(|b| !b.is_ascii_whitespace())
            .unwrap_or(bytes.len());
        bytes[start..].starts_with(b"solid")
            && bytes
                .iter()
                .all(|&b| b.is_ascii_graphic() || b.is_ascii_whitespace())
    };
    if bytes.len() >= HEADER + 4 {
        let count = u32::from_le_bytes(bytes[HEADER..HEADER + 4].try_into().unwrap()) as usize;
        let expected = HEADER + 4 + FACET * count;
        if bytes.len() == expected {
            return parse_binary(bytes, count);
        }
        if looks_ascii {
            return parse_ascii(bytes);
        }
        if bytes.len() < expected {
            return Err(MeshIoError::Truncated {
                expected,
                actual: bytes.len(),
            });
        }
        return Err(MeshIoError::Malformed {
            offset: HEADER,
            message: format!(
                "facet count {count} needs {expected} bytes but the file has {}",
                bytes.len()
            ),
        });
    }
    if looks_ascii {
        return parse_ascii(bytes);
    }
    Err(MeshIoError::Truncated {
        expected: HEADER + 4,
        actual: bytes.len(),
    })
}

fn parse_binary(bytes: &[u8], count: usize) -> Result<StlDocument, MeshIoError> {
    let mut facets = Vec::with_capacity(count);
    for i in 0..count {
        let base = HEADER + 4 + FACET * i;
        let mut f = [0f32; 12];
        for (k, x) in f.iter_mut().enumerate() {
            let at = base + 4 * k;
            *x = f32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
            if !x.is_finite() {
                return Err(MeshIoError::Malformed {
                    offset: at,
                    message: format!("non-finite value {x} in facet {i}"),
                });
            }
        }
        facets.push(StlFacet {
            normal: [f[0], f[1], f[2]],
            vertices: [[f[3], f[4], f[5]], [f[6], f[7], f[8]], [f[9], f[10], f[11]]],
            attribute: u16::from_le_bytes([bytes[base + 48], bytes[base + 49]]),
        });
    }
    Ok(StlDocument {
        format: StlFormat::Binary,
        header: bytes[..HEADER].to_vec(),
        facets,
    })
}

struct Tokens<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Option<(usize, &'a str)> {
        let rest = &self.text[self.pos..];
        let start = self.pos + rest.len() - rest.trim_start().len();
        let rest = &self.text[start..];
        if rest.is_empty() {
            self.pos = start;
            return None;
        }
        let len = rest
            .find(|c: char| c.is_ascii_whitespace())
            .unwrap_or(rest.len());
        self.pos = start + len;
        Some((start, &rest[..len]))
    }

    fn rest_of_line(&mut self) -> &'a str {
        let rest = &self.text[self.pos..];
        let len = rest.find('\n').unwrap_or(rest.len());
        self.pos += len;
        rest[..len].trim()
    }

    fn expect(&mut self, word: &str) -> Result<(), MeshIoError> {
        match self.next() {
            Some((_, t)) if t.eq_ignore_ascii_case(word) => Ok(()),
            Some((at, t)) => Err(malformed(at, format!("expected `{word}`, found `{t}`"))),
            None => Err(malformed(
                self.pos,
                format!("expected `{word}`, found end of file"),
            )),
        }
    }

    fn float(&mut self) -> Result<f32, MeshIoError> {
        let (at, t) = self
            .next()
            .ok_or_else(|| malformed(self.pos, "expected a number, found end of file".into()))?;
        let x: f32 = t
            .parse()
            .map_err(|_| malformed(at, format!("expected a number, found `{t}`")))?;
        if !x.is_finite() {
            return Err(malformed(at, format!("non-finite value `{t}`")));
        }
        Ok(x)
    }

    fn triple(&mut self) -> Result<[f32; 3], MeshIoError> {
        Ok([self.float()?, self.float()?, self.float()?])
    }
}

fn malformed(offset: usize, message: String) -> MeshIoError {
    MeshIoError::Malformed { offset, message }
}

fn parse_ascii(bytes: &[u8]) -> Result<StlDocument, MeshIoError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| malformed(e.valid_up_to(), "not UTF-8 text".into()))?;
    let mut tk = Tokens { text, pos: 0 };
    tk.expect("solid")?;
    let name = tk.rest_of_line().as_bytes().to_vec();
    let mut facets = Vec::new();
    loop {
        match tk.next() {
            Some((_, t)) if t.eq_ignore_ascii_case("facet") => {
                tk.expect("normal")?;
                let normal = tk.triple()?;
                tk.expect("outer")?;
                tk.expect("loop")?;
                let mut vertices = [[0f32; 3]; 3];
                for v in &mut vertices {
                    tk.expect("vertex")?;
                    *v = tk.triple()?;
                }
                tk.expect("endloop")?;
                tk.expect("endfacet")?;
                facets.push(StlFacet {
                    normal,
                    vertices,
                    attribute: 0,
                });
            }
            Some((_, t)) if t.eq_ignore_ascii_case("endsolid") => {
                tk.rest_of_line();
                if let Some((at, t)) = tk.next() {
                    return Err(malformed(at, format!("unexpected `{t}` after endsolid")));
                }
                break;
            }
            Some((at, t)) => {
                return Err(malformed(
                    at,
                    format!("expected `facet` or `endsolid`, found `{t}`"),
                ))
            }
            None => return Err(malformed(text.len(), "missing `endsolid`".into())),
        }
    }
    Ok(StlDocument {
        format: StlFormat::Ascii,
        header: name,
        facets,
    })
}
