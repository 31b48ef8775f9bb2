use super::{marching_cubes, mesh_to_field, CsgNode, GridSpec, ImplicitError};
use crate::mesh::{bounds, TriangleMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BooleanOp {
    Union,
    Intersection,
    Difference,
}

/// Grid over the union of both bounding boxes, grown by two cells on every
/// side, with `n` cells spanning the original box along each axis.
pub fn default_boolean_grid(
    a: &TriangleMesh,
    b: &TriangleMesh,
    n: usize,
) -> Result<GridSpec, ImplicitError> {
    let bx = bounds(a)?.union(&bounds(b)?);
    let n = n.max(2);
    let h = bx.extent() / n as f64;
    Ok(GridSpec::new(bx.inflate(h * 2.0), [n + 4; 3]))
}

/// Boolean of two closed meshes by resampling their parity fields.
/// `grid` defaults to [`default_boolean_grid`] at 64 cells.
pub fn mesh_boolean(
    a: &TriangleMesh,
    b: &TriangleMesh,
    op: BooleanOp,
    grid: Option<GridSpec>,
) -> Result<TriangleMesh, ImplicitError> {
    let grid = match grid {
        Some(g) => g,
        None => default_boolean_grid(a, b, 64)?,
    };
    let fa = CsgNode::leaf(mesh_to_field(a)?);
    let fb = CsgNode::leaf(mesh_to_field(b)?);
    let node = match op {
        BooleanOp::Union => CsgNode::Union(vec![fa, fb]),
        BooleanOp::Intersection => CsgNode::Intersection(vec![fa, fb]),
        BooleanOp::Difference => CsgNode::difference(fa, fb),
    };
    marching_cubes(&node, &grid)
}
