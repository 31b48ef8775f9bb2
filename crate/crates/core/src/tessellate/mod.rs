//! Analytic shapes to triangle meshes: primitives, tubes along curves,
//! thickened surfaces, B-splines and wireframes.

mod bspline;
mod curve;
mod polyhedra;
mod primitive;
mod revolve;
mod shell;
mod surface;
mod tube;
mod wireframe;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::MeshError;

pub use bspline::{
    bspline_curve_point, bspline_surface, bspline_surface_point, bspline_weights, BsplineCurve,
};
pub use curve::{Curve, ExprCurve, FnCurve};
pub use polyhedra::{polyhedron, PolyhedronName};
pub use primitive::{icosphere, primitive, PrimitiveSpec};
pub use shell::thicken;
pub use surface::{graph_surface, parametric_surface, ExprSurface, GraphDomain, SurfaceMode};
pub use tube::{tube_sweep, Caps};
pub use wireframe::{polygon_edges, wireframe, Wireframe};

/// Discretization budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityParams {
    /// Upper bound on the area of any generated triangle.
    pub max_cell_area: Option<f64>,
    /// Samples along a curve, or per surface parameter.
    pub points_along: usize,
    /// Samples around a tube or disk.
    pub points_around: usize,
}

impl Default for QualityParams {
    fn default() -> Self {
        QualityParams {
            max_cell_area: None,
            points_along: 100,
            points_around: 24,
        }
    }
}

impl QualityParams {
    pub fn validate(&self) -> Result<(), TessellateError> {
        if self.points_along < 2 {
            return Err(TessellateError::Quality(format!(
                "points_along must be at least 2, got {}",
                self.points_along
            )));
        }
        if self.points_around < 3 {
            return Err(TessellateError::Quality(format!(
                "points_around must be at least 3, got {}",
                self.points_around
            )));
        }
        if let Some(a) = self.max_cell_area {
            if !(a > 0.0 && a.is_finite()) {
                return Err(TessellateError::Quality(format!(
                    "max_cell_area must be positive, got {a}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TessellateError {
    #[error("invalid quality settings: {0}")]
    Quality(String),
    #[error("invalid shape: {0}")]
    Spec(String),
    #[error("no subdivision up to depth {cap} meets max_cell_area {budget} (depth {cap} gives {reached})")]
    BudgetInfeasible { budget: f64, cap: u32, reached: f64 },
    #[error("curve tangent vanishes at t = {t}")]
    DegenerateTangent { t: f64 },
    #[error("closed curve does not meet itself: endpoints {gap} apart")]
    NotClosed { gap: f64 },
    #[error("{what} is not finite at {at}")]
    NonFinite { what: String, at: String },
    #[error("thickness must be positive, got {0}")]
    Thickness(f64),
    #[error("surface is not periodic in {axis}: seam samples up to {gap} apart")]
    Seam { axis: char, gap: f64 },
    #[error("surface normal vanishes at {at}")]
    DegenerateNormal { at: String },
    #[error("need at least {needed} control points, got {got}")]
    TooFewControlPoints { needed: usize, got: usize },
    #[error("wireframe edge {index} has zero length")]
    ZeroLengthEdge { index: usize },
    #[error("expression error: {0}")]
    Expr(String),
    #[error("generated surface is not closed: {0}")]
    NotWatertight(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}
