use super::{
    marching_cubes, Continuity, CsgNode, FieldSource, GridSpec, ImplicitError, SignedField,
};
use crate::expr::{BoundExpr, Expr};
use crate::mesh::TriangleMesh;

/// Thickened level set `f = k`: meshes the band `|f - k| <= delta`.
///
/// The band's true width is roughly `2 * delta / |grad f|`, so it thins where
/// `f` is steep and balloons near critical points.
pub fn iso_shell(
    f: &Expr,
    k: f64,
    delta: f64,
    grid: &GridSpec,
) -> Result<TriangleMesh, ImplicitError> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(ImplicitError::Thickness(delta));
    }
    f.check_variables(&["x", "y", "z"])
        .map_err(|e| ImplicitError::Expr(e.to_string()))?;
    let bound =
        BoundExpr::bind(f, &["x", "y", "z"]).map_err(|e| ImplicitError::Expr(e.to_string()))?;
    let field = SignedField::new(
        move |p| match bound.eval(&[p.x, p.y, p.z]) {
            Ok(v) => (v - k).abs() - delta,
            Err(_) => f64::NAN,
        },
        Continuity::Continuous,
        FieldSource::Expression,
    );
    marching_cubes(&CsgNode::leaf(field), grid)
}
