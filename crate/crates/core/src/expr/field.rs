use super::eval::BoundExpr;
use super::{BinOp, CmpOp, Expr, ExprError, ExprKind, ValueKind};
use crate::geom::Vec3;
use crate::implicit::{Continuity, FieldSource, SignedField};

const XYZ: [&str; 3] = ["x", "y", "z"];

enum Pred {
    Leaf(BoundExpr),
    Max(Box<Pred>, Box<Pred>),
    Min(Box<Pred>, Box<Pred>),
    Neg(Box<Pred>),
}

impl Pred {
    fn eval(&self, p: &[f64; 3]) -> f64 {
        match self {
            // evaluation errors become NaN; the mesher rejects non-finite samples
            Pred::Leaf(e) => e.eval(p).unwrap_or(f64::NAN),
            // f64::max/min would swallow a NaN operand
            Pred::Max(a, b) => nan_max(a.eval(p), b.eval(p)),
            Pred::Min(a, b) => -nan_max(-a.eval(p), -b.eval(p)),
            Pred::Neg(a) => -a.eval(p),
        }
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Turns a boolean predicate over `x, y, z` into a field that is `<= 0`
/// exactly where the predicate holds (up to boundaries).
///
/// `f <= k` and `f < k` become `f - k`, `f >= k` and `f > k` become `k - f`,
/// `&&` is a pointwise max, `||` a pointwise min and `!` a negation. Equality
/// is rejected because a level set encloses no volume.
pub fn to_signed_field(ast: &Expr) -> Result<SignedField, ExprError> {
    if ast.value_kind() != ValueKind::Boolean {
        return Err(ExprError::NotAPredicate { span: ast.span });
    }
    ast.check_variables(&XYZ)?;
    let pred = lower(ast)?;
    Ok(SignedField::new(
        move |p: Vec3| pred.eval(&[p.x, p.y, p.z]),
        Continuity::Continuous,
        FieldSource::Expression,
    ))
}

fn lower(ast: &Expr) -> Result<Pred, ExprError> {
    Ok(match &ast.kind {
        ExprKind::Compare { op, lhs, rhs } => {
            let (a, b) = match op {
                CmpOp::Le | CmpOp::Lt => (lhs, rhs),
                CmpOp::Ge | CmpOp::Gt => (rhs, lhs),
                CmpOp::Eq => return Err(ExprError::EqualityInRegion { span: ast.span }),
            };
            let diff = Expr::new(
                ExprKind::Binary {
                    op: BinOp::Sub,
                    lhs: a.clone(),
                    rhs: b.clone(),
                },
                ast.span,
            );
            let bound = BoundExpr::bind(&diff, &XYZ).map_err(|e| ExprError::Type {
                message: e.to_string(),
                span: ast.span,
            })?;
            Pred::Leaf(bound)
        }
        ExprKind::And(a, b) => Pred::Max(Box::new(lower(a)?), Box::new(lower(b)?)),
        ExprKind::Or(a, b) => Pred::Min(Box::new(lower(a)?), Box::new(lower(b)?)),
        ExprKind::Not(a) => Pred::Neg(Box::new(lower(a)?)),
        _ => return Err(ExprError::NotAPredicate { span: ast.span }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn field(src: &str) -> SignedField {
        to_signed_field(&parse_expression(src).unwrap()).unwrap()
    }

    #[test]
    fn halfspace() {
        assert_eq!(field("x <= 0").eval(Vec3::new(-1.0, 0.0, 0.0)), -1.0);
        assert_eq!(field("0 >= x").eval(Vec3::new(-1.0, 0.0, 0.0)), -1.0);
    }

    #[test]
    fn two_sphere_lens() {
        let f = field("x^2+y^2+z^2 <= 1 && (x-1)^2+y^2+z^2 <= 1");
        assert_eq!(f.eval(Vec3::new(0.5, 0.0, 0.0)), -0.75);
    }

    #[test]
    fn slab_complement() {
        let f = field("x<=0 || x>=1");
        assert_eq!(f.eval(Vec3::new(0.5, 0.0, 0.0)), 0.5);
        assert!(f.eval(Vec3::new(2.0, 0.0, 0.0)) < 0.0);
    }

    #[test]
    fn negation_and_strictness() {
        let f = field("!(x < 1)");
        assert_eq!(f.eval(Vec3::new(3.0, 0.0, 0.0)), -2.0);
        assert_eq!(
            field("x < 1").eval(Vec3::ZERO),
            field("x <= 1").eval(Vec3::ZERO)
        );
    }

    #[test]
    fn rejections() {
        let eq = to_signed_field(&parse_expression("x^3 + y^2 - z^2 == 0").unwrap());
        assert!(matches!(eq, Err(ExprError::EqualityInRegion { .. })));
        let t = to_signed_field(&parse_expression("t <= 1").unwrap());
        assert!(matches!(t, Err(ExprError::UndeclaredVariable { .. })));
        let num = to_signed_field(&parse_expression("x + 1").unwrap());
        assert!(matches!(num, Err(ExprError::NotAPredicate { .. })));
    }

    #[test]
    fn domain_errors_become_nan() {
        let f = field("sqrt(x) <= 1");
        assert!(f.eval(Vec3::new(-1.0, 0.0, 0.0)).is_nan());
    }
}
