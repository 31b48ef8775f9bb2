use super::TessellateError;
use crate::expr::{BoundExpr, Expr};
use crate::geom::Vec3;

/// A parametric space curve.
pub trait Curve: Sync {
    fn point(&self, t: f64) -> Result<Vec3, TessellateError>;
}

/// Curve given by three expressions in one parameter.
#[derive(Debug, Clone)]
pub struct ExprCurve {
    coords: [BoundExpr; 3],
}

impl ExprCurve {
    pub fn new(x: &Expr, y: &Expr, z: &Expr, param: &str) -> Result<Self, TessellateError> {
        let bind = |e: &Expr| {
            e.check_variables(&[param])
                .map_err(|e| TessellateError::Expr(e.to_string()))?;
            BoundExpr::bind(e, &[param]).map_err(|e| TessellateError::Expr(e.to_string()))
        };
        Ok(ExprCurve {
            coords: [bind(x)?, bind(y)?, bind(z)?],
        })
    }
}

impl Curve for ExprCurve {
    fn point(&self, t: f64) -> Result<Vec3, TessellateError> {
        let mut p = [0.0; 3];
        for (k, e) in self.coords.iter().enumerate() {
            p[k] = e
                .eval(&[t])
                .map_err(|e| TessellateError::Expr(format!("at t = {t}: {e}")))?;
        }
        let p = Vec3::from(p);
        if !p.is_finite() {
            return Err(TessellateError::NonFinite {
                what: "curve point".into(),
                at: format!("t = {t}"),
            });
        }
        Ok(p)
    }
}

/// Adapts a closure.
pub struct FnCurve<F>(pub F);

impl<F: Fn(f64) -> Vec3 + Sync> Curve for FnCurve<F> {
    fn point(&self, t: f64) -> Result<Vec3, TessellateError> {
        let p = (self.0)(t);
        if !p.is_finite() {
            return Err(TessellateError::NonFinite {
                what: "curve point".into(),
                at: format!("t = {t}"),
            });
        }
        Ok(p)
    }
}
