//! Signed fields, CSG trees over them, and marching-cubes meshing.
//!
//! A field is `<= 0` inside its region. Meshing only looks at signs, so the
//! min/max CSG combinators are good enough even though they are not true
//! distances.

mod boolean;
mod iso;
mod marching;
mod parity;
mod table;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::geom::{Aabb, Vec3};
use crate::mesh::MeshError;

pub use boolean::{default_boolean_grid, mesh_boolean, BooleanOp};
pub use iso::iso_shell;
pub use marching::marching_cubes;
pub use parity::mesh_to_field;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImplicitError {
    #[error("grid resolution {0:?} must be at least 2 along every axis")]
    Resolution([usize; 3]),
    #[error("grid box is degenerate: {min} .. {max}")]
    DegenerateBox { min: Vec3, max: Vec3 },
    #[error("field evaluated to a non-finite value at {0}")]
    NonFinite(Vec3),
    #[error("iso-shell half-thickness must be positive, got {0}")]
    Thickness(f64),
    #[error("input mesh is not watertight: {0}")]
    NotWatertight(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("{0}")]
    Expr(String),
}

/// How much the field's magnitude can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Continuity {
    /// Exact signed distance; linear edge interpolation is accurate.
    ExactDistance,
    /// Continuous but not a distance.
    Continuous,
    /// Only the sign carries information; values are exactly -1 or +1.
    SignOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSource {
    Primitive,
    Expression,
    Csg,
    MeshParity,
}

type FieldFn = dyn Fn(Vec3) -> f64 + Send + Sync;

/// Point-to-real function, inside where the value is `<= 0`.
#[derive(Clone)]
pub struct SignedField {
    f: Arc<FieldFn>,
    pub continuity: Continuity,
    pub source: FieldSource,
}

impl fmt::Debug for SignedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SignedField")
            .field("continuity", &self.continuity)
            .field("source", &self.source)
            .finish_non_exhaustive()
    }
}

impl SignedField {
    pub fn new<F>(f: F, continuity: Continuity, source: FieldSource) -> Self
    where
        F: Fn(Vec3) -> f64 + Send + Sync + 'static,
    {
        SignedField {
            f: Arc::new(f),
            continuity,
            source,
        }
    }

    #[inline]
    pub fn eval(&self, p: Vec3) -> f64 {
        (self.f)(p)
    }

    pub fn sphere(center: Vec3, radius: f64) -> Self {
        SignedField::new(
            move |p| (p - center).norm() - radius,
            Continuity::ExactDistance,
            FieldSource::Primitive,
        )
    }

    /// Exact box distance.
    pub fn cuboid(min: Vec3, max: Vec3) -> Self {
        let c = (min + max) * 0.5;
        let h = (max - min) * 0.5;
        SignedField::new(
            move |p| {
                let q = Vec3::new(
                    (p.x - c.x).abs() - h.x,
                    (p.y - c.y).abs() - h.y,
                    (p.z - c.z).abs() - h.z,
                );
                q.max(Vec3::ZERO).norm() + q.x.max(q.y).max(q.z).min(0.0)
            },
            Continuity::ExactDistance,
            FieldSource::Primitive,
        )
    }

    /// Capped cylinder between `p1` and `p2`; sign-correct, continuous.
    pub fn cylinder(p1: Vec3, p2: Vec3, radius: f64) -> Self {
        let axis = p2 - p1;
        let len = axis.norm();
        let dir = axis / len;
        SignedField::new(
            move |p| {
                let d = p - p1;
                let t = d.dot(dir);
                let radial = (d - dir * t).norm() - radius;
                let along = (t - len * 0.5).abs() - len * 0.5;
                radial.max(along)
            },
            Continuity::Continuous,
            FieldSource::Primitive,
        )
    }

    /// Solid cone with base disk at `base` and tip at `apex`.
    pub fn cone(base: Vec3, apex: Vec3, radius: f64) -> Self {
        let axis = apex - base;
        let h = axis.norm();
        let dir = axis / h;
        SignedField::new(
            move |p| {
                let d = p - base;
                let t = d.dot(dir);
                let r = (d - dir * t).norm();
                // distance-like to the slanted side: positive outside the cone surface
                let slant = (r - radius * (1.0 - t / h)) * h / (h * h + radius * radius).sqrt();
                slant.max(-t).max(t - h)
            },
            Continuity::Continuous,
            FieldSource::Primitive,
        )
    }
}

/// Constructive solid geometry over signed fields.
#[derive(Debug, Clone)]
pub enum CsgNode {
    Leaf(SignedField),
    Union(Vec<CsgNode>),
    Intersection(Vec<CsgNode>),
    Difference(Box<CsgNode>, Box<CsgNode>),
    Complement(Box<CsgNode>),
}

impl CsgNode {
    pub fn leaf(f: SignedField) -> Self {
        CsgNode::Leaf(f)
    }

    pub fn difference(a: CsgNode, b: CsgNode) -> Self {
        CsgNode::Difference(Box::new(a), Box::new(b))
    }

    pub fn complement(a: CsgNode) -> Self {
        CsgNode::Complement(Box::new(a))
    }

    /// Weakest continuity among the leaves; decides how edge crossings are found.
    pub fn continuity(&self) -> Continuity {
        fn rank(c: Continuity) -> u8 {
            match c {
                Continuity::ExactDistance => 0,
                Continuity::Continuous => 1,
                Continuity::SignOnly => 2,
            }
        }
        match self {
            CsgNode::Leaf(f) => f.continuity,
            CsgNode::Union(ch) | CsgNode::Intersection(ch) => ch
                .iter()
                .map(|c| c.continuity())
                .max_by_key(|c| rank(*c))
                .unwrap_or(Continuity::ExactDistance),
            CsgNode::Difference(a, b) => {
                let (x, y) = (a.continuity(), b.continuity());
                if rank(x) >= rank(y) {
                    x
                } else {
                    y
                }
            }
            CsgNode::Complement(a) => a.continuity(),
        }
    }
}

/// Evaluates a CSG tree: union is min, intersection max, difference
/// `max(a, -b)`, complement negation. Empty unions are everywhere outside and
/// empty intersections everywhere inside.
pub fn csg_eval(node: &CsgNode, p: Vec3) -> f64 {
    match node {
        CsgNode::Leaf(f) => f.eval(p),
        CsgNode::Union(ch) => ch
            .iter()
            .map(|c| csg_eval(c, p))
            .fold(f64::INFINITY, f64::min),
        CsgNode::Intersection(ch) => ch
            .iter()
            .map(|c| csg_eval(c, p))
            .fold(f64::NEG_INFINITY, f64::max),
        CsgNode::Difference(a, b) => csg_eval(a, p).max(-csg_eval(b, p)),
        CsgNode::Complement(a) => -csg_eval(a, p),
    }
}

/// Sampling lattice for marching cubes.
///
/// `resolution[i]` samples are placed at the centers of equal cells spanning
/// the box along axis `i`; a ghost layer of outside samples surrounds them so
/// regions that reach the box get flat walls on its faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub bounds: Aabb,
    pub resolution: [usize; 3],
    pub bisection_iterations: u32,
}

impl GridSpec {
    pub const DEFAULT_BISECTION: u32 = 16;

    pub fn new(bounds: Aabb, resolution: [usize; 3]) -> Self {
        GridSpec {
            bounds,
            resolution,
            bisection_iterations: Self::DEFAULT_BISECTION,
        }
    }

    pub fn cubic(bounds: Aabb, n: usize) -> Self {
        Self::new(bounds, [n, n, n])
    }

    pub fn validate(&self) -> Result<(), ImplicitError> {
        if self.resolution.iter().any(|&n| n < 2) {
            return Err(ImplicitError::Resolution(self.resolution));
        }
        let e = self.bounds.extent();
        if !(e.x > 0.0 && e.y > 0.0 && e.z > 0.0) || !e.is_finite() {
            return Err(ImplicitError::DegenerateBox {
                min: self.bounds.min,
                max: self.bounds.max,
            });
        }
        Ok(())
    }

    pub fn cell_size(&self) -> Vec3 {
        let e = self.bounds.extent();
        Vec3::new(
            e.x / self.resolution[0] as f64,
            e.y / self.resolution[1] as f64,
            e.z / self.resolution[2] as f64,
        )
    }
}
