//! Scene documents: the JSON schema, its loader and the build pipeline that
//! turns every object into a mesh and writes the requested files.

mod build;
mod load;

use std::path::PathBuf;

use thiserror::Error;

use crate::expr::Expr;
use crate::geom::{Aabb, Vec3};
use crate::mesh::{ResizeTarget, Rgb};
use crate::tessellate::{Caps, GraphDomain, PrimitiveSpec, QualityParams, SurfaceMode};

pub use build::{build, BuildOptions, BuildOutput};
pub use load::{load_scene, load_scene_file};

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Schema(String),
    #[error("{location}: {message}")]
    Field { location: String, message: String },
    #[error("{location}, field `{field}`: {message}")]
    Expr {
        location: String,
        field: String,
        position: usize,
        message: String,
    },
    #[error("{location}: {message}")]
    Build { location: String, message: String },
    #[error("{location} is not closed: {boundary} boundary edges, {nonmanifold} non-manifold edges, orientation consistent: {consistent}")]
    NotWatertight {
        location: String,
        boundary: usize,
        nonmanifold: usize,
        consistent: bool,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl SceneError {
    /// Problems with the scene document itself, as opposed to building it or
    /// touching files.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            SceneError::Json { .. }
                | SceneError::Schema(_)
                | SceneError::Field { .. }
                | SceneError::Expr { .. }
        )
    }
}

/// Scene-wide sampling defaults; objects may override any of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneQuality {
    pub max_cell_area: Option<f64>,
    pub points_along: usize,
    pub points_around: usize,
    /// Marching-cubes samples per axis.
    pub grid_resolution: usize,
    pub bisection_iterations: u32,
}

impl Default for SceneQuality {
    fn default() -> Self {
        let q = QualityParams::default();
        SceneQuality {
            max_cell_area: q.max_cell_area,
            points_along: q.points_along,
            points_around: q.points_around,
            grid_resolution: 64,
            bisection_iterations: crate::implicit::GridSpec::DEFAULT_BISECTION,
        }
    }
}

impl SceneQuality {
    pub fn params(&self) -> QualityParams {
        QualityParams {
            max_cell_area: self.max_cell_area,
            points_along: self.points_along,
            points_around: self.points_around,
        }
    }

    fn overlay(mut self, o: &QualityOverride) -> Self {
        if o.max_cell_area.is_some() {
            self.max_cell_area = o.max_cell_area;
        }
        self.points_along = o.points_along.unwrap_or(self.points_along);
        self.points_around = o.points_around.unwrap_or(self.points_around);
        self.grid_resolution = o.grid_resolution.unwrap_or(self.grid_resolution);
        self.bisection_iterations = o.bisection_iterations.unwrap_or(self.bisection_iterations);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QualityOverride {
    pub max_cell_area: Option<f64>,
    pub points_along: Option<usize>,
    pub points_around: Option<usize>,
    pub grid_resolution: Option<usize>,
    pub bisection_iterations: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Transform {
    Rotate { angle: f64, axis: Vec3, point: Vec3 },
    Translate(Vec3),
    Scale { factors: Vec3, anchor: Vec3 },
    Resize(ResizeTarget),
    CenterAtOrigin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsgOp {
    Union,
    Intersection,
    Difference,
    Complement,
}

#[derive(Debug, Clone)]
pub enum ObjectKind {
    Primitive(PrimitiveSpec),
    ParametricCurve {
        coords: [Expr; 3],
        t: (f64, f64),
        radius: f64,
        closed: bool,
        caps: Caps,
    },
    BsplineCurve {
        control: Vec<Vec3>,
        closed: bool,
        degree: usize,
        radius: f64,
        caps: Caps,
    },
    GraphSurface {
        f: Expr,
        domain: GraphDomain,
        thickness: f64,
    },
    ParametricSurface {
        coords: [Expr; 3],
        u: (f64, f64),
        v: (f64, f64),
        mode: SurfaceMode,
        samples: Option<[usize; 2]>,
    },
    BsplineSurface {
        control: Vec<Vec<Vec3>>,
        degree: usize,
        mode: SurfaceMode,
        samples: Option<[usize; 2]>,
    },
    IsoShell {
        f: Expr,
        k: f64,
        delta: f64,
        bounds: Aabb,
        resolution: Option<[usize; 3]>,
    },
    Region {
        predicate: Expr,
        bounds: Aabb,
        resolution: Option<[usize; 3]>,
    },
    WireframeOf {
        source: Box<SceneObject>,
        thickness: f64,
    },
    Csg {
        op: CsgOp,
        children: Vec<SceneObject>,
        bounds: Option<Aabb>,
        resolution: Option<[usize; 3]>,
    },
}

#[derive(Debug, Clone)]
pub struct SceneObject {
    pub name: Option<String>,
    pub kind: ObjectKind,
    pub color: Option<Rgb>,
    /// Applied in order after the object is generated.
    pub transforms: Vec<Transform>,
    pub quality: QualityOverride,
    pub allow_open: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    StlBinary,
    StlAscii,
    Ply,
    Wrl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Export {
    pub format: ExportFormat,
    /// Relative paths resolve against the build's output directory.
    pub path: PathBuf,
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub name: String,
    pub quality: SceneQuality,
    pub objects: Vec<SceneObject>,
    pub exports: Vec<Export>,
    /// Directory of the scene file, when it was loaded from one.
    pub base_dir: Option<PathBuf>,
}

impl Scene {
    /// "object 3 (carrot)" style label used in messages.
    pub fn label(&self, index: usize) -> String {
        object_label(
            index,
            self.objects.get(index).and_then(|o| o.name.as_deref()),
        )
    }
}

pub(crate) fn object_label(index: usize, name: Option<&str>) -> String {
    match name {
        Some(n) => format!("object {index} ({n})"),
        None => format!("object {index}"),
    }
}
