//! The indexed triangle mesh and everything that queries or reshapes it.

mod ops;
mod query;
mod validate;
mod weld;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{GeomError, Vec3};

pub use ops::{apply_transform, center_at_origin, merge, merge_with_stats, resize, ResizeTarget};
pub use query::{
    bounds, centroid, enclosed_volume, extract, signed_volume, surface_area, Centroid,
    CentroidKind, Extracted,
};
pub use validate::{default_weld_tolerance, validate, ValidationReport};
pub use weld::{weld_points, Welded};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {triangle} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: u32,
        count: usize,
    },
    #[error("triangle {triangle} repeats vertex {index}")]
    RepeatedIndex { triangle: usize, index: u32 },
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("{colors} colors for {vertices} vertices")]
    ColorCount { colors: usize, vertices: usize },
    #[error("{colors} colors given for {meshes} meshes")]
    ColorListLength { colors: usize, meshes: usize },
    #[error("mesh is not closed ({boundary} boundary edges, {nonmanifold} non-manifold edges, orientation consistent: {consistent})")]
    NotClosed {
        boundary: usize,
        nonmanifold: usize,
        consistent: bool,
    },
    #[error("mesh encloses zero volume")]
    ZeroVolume,
    #[error("mesh has zero extent along {axis}")]
    ZeroExtent { axis: char },
    #[error("resize target along {axis} must be positive, got {value}")]
    BadTarget { axis: char, value: f64 },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// RGB color, channels in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rgb {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl Rgb {
    pub const WHITE: Rgb = Rgb::new(1.0, 1.0, 1.0);
    pub const BLACK: Rgb = Rgb::new(0.0, 0.0, 0.0);
    pub const ORANGE: Rgb = Rgb::new(1.0, 0.5, 0.0);
    pub const RED: Rgb = Rgb::new(1.0, 0.0, 0.0);
    pub const GREEN: Rgb = Rgb::new(0.0, 1.0, 0.0);
    pub const BLUE: Rgb = Rgb::new(0.0, 0.0, 1.0);
    pub const GRAY: Rgb = Rgb::new(0.5, 0.5, 0.5);

    pub const fn new(r: f64, g: f64, b: f64) -> Self {
        Rgb { r, g, b }
    }

    /// Named colors plus `#RRGGBB`.
    pub fn parse(s: &str) -> Option<Rgb> {
        match s {
            "white" => Some(Rgb::WHITE),
            "black" => Some(Rgb::BLACK),
            "orange" => Some(Rgb::ORANGE),
            "red" => Some(Rgb::RED),
            "green" => Some(Rgb::GREEN),
            "blue" => Some(Rgb::BLUE),
            "gray" => Some(Rgb::GRAY),
            hex if hex.len() == 7 && hex.starts_with('#') => {
                let ch = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).ok();
                Some(Rgb::from_bytes([ch(1)?, ch(3)?, ch(5)?]))
            }
            _ => None,
        }
    }

    pub fn from_bytes(b: [u8; 3]) -> Rgb {
        Rgb::new(
            b[0] as f64 / 255.0,
            b[1] as f64 / 255.0,
            b[2] as f64 / 255.0,
        )
    }

    pub fn to_bytes(self) -> [u8; 3] {
        let q = |c: f64| (c.clamp(0.0, 1.0) * 255.0).round() as u8;
        [q(self.r), q(self.g), q(self.b)]
    }
}

/// Indexed triangle mesh. Triangles wind counterclockwise seen from outside.
///
/// Invariants (checked by [`TriangleMesh::new`]): indices in range, no
/// triangle repeats a vertex, finite coordinates, and one color per vertex
/// when colors are present.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[u32; 3]>,
    colors: Option<Vec<Rgb>>,
}

impl TriangleMesh {
    pub fn new(
        vertices: Vec<Vec3>,
        triangles: Vec<[u32; 3]>,
        colors: Option<Vec<Rgb>>,
    ) -> Result<Self, MeshError> {
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(MeshError::NonFinite(i));
        }
        let n = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i as usize >= n {
                    return Err(MeshError::IndexOutOfRange {
                        triangle: t,
                        index: i,
                        count: n,
                    });
                }
            }
            if tri[0] == tri[1] || tri[0] == tri[2] {
                return Err(MeshError::RepeatedIndex {
                    triangle: t,
                    index: tri[0],
                });
            }
            if tri[1] == tri[2] {
                return Err(MeshError::RepeatedIndex {
                    triangle: t,
                    index: tri[1],
                });
            }
        }
        if let Some(c) = &colors {
            if c.len() != n {
                return Err(MeshError::ColorCount {
                    colors: c.len(),
                    vertices: n,
                });
            }
        }
        Ok(TriangleMesh {
            vertices,
            triangles,
            colors,
        })
    }

    pub fn empty() -> Self {
        TriangleMesh {
            vertices: Vec::new(),
            triangles: Vec::new(),
            colors: None,
        }
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn colors(&self) -> Option<&[Rgb]> {
        self.colors.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle(&self, t: usize) -> [Vec3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle(t);
        0.5 * (b - a).cross(c - a).norm()
    }

    /// Same geometry painted a single color.
    pub fn with_color(mut self, color: Rgb) -> Self {
        self.colors = Some(vec![color; self.vertices.len()]);
        self
    }

    pub fn without_colors(mut self) -> Self {
        self.colors = None;
        self
    }

    /// Reverses every triangle's winding.
    pub fn flipped(mut self) -> Self {
        for t in &mut self.triangles {
            t.swap(1, 2);
        }
        self
    }

    pub fn into_parts(self) -> (Vec<Vec3>, Vec<[u32; 3]>, Option<Vec<Rgb>>) {
        (self.vertices, self.triangles, self.colors)
    }
}

/// Unit cube `[0,1]^3` as 12 outward triangles; handy in tests and fixtures.
pub fn unit_cube() -> TriangleMesh {
    let v = (0..8)
        .map(|i| Vec3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
        .collect();
    let t = vec![
        [0, 2, 1],
        [1, 2, 3], // z = 0
        [4, 5, 6],
        [5, 7, 6], // z = 1
        [0, 1, 4],
        [1, 5, 4], // y = 0
        [2, 6, 3],
        [3, 6, 7], // y = 1
        [0, 4, 2],
        [2, 4, 6], // x = 0
        [1, 3, 5],
        [3, 7, 5], // x = 1
    ];
    TriangleMesh::new(v, t, None).expect("static cube")
}
