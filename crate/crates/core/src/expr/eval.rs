use std::collections::HashMap;
use std::f64::consts::{E, PI};

use thiserror::Error;

use super::{BinOp, Expr, ExprKind, Func, Span};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable '{name}' at position {}", span.start)]
    Unbound { name: String, span: Span },
    #[error("domain error at position {}: {message}", span.start)]
    Domain { message: String, span: Span },
    #[error("expression at position {} is a predicate, not a number", span.start)]
    NotNumeric { span: Span },
}

/// Evaluates a numeric expression with IEEE doubles.
pub fn eval_scalar(ast: &Expr, env: &HashMap<String, f64>) -> Result<f64, EvalError> {
    match &ast.kind {
        ExprKind::Number(v) => Ok(*v),
        ExprKind::Pi => Ok(PI),
        ExprKind::E => Ok(E),
        ExprKind::Var(name) => env.get(name).copied().ok_or_else(|| EvalError::Unbound {
            name: name.clone(),
            span: ast.span,
        }),
        ExprKind::Neg(a) => Ok(-eval_scalar(a, env)?),
        ExprKind::Binary { op, lhs, rhs } => apply_binary(
            *op,
            eval_scalar(lhs, env)?,
            eval_scalar(rhs, env)?,
            ast.span,
        ),
        ExprKind::Call { func, args } => {
            let a = eval_scalar(&args[0], env)?;
            let b = match args.get(1) {
                Some(e) => eval_scalar(e, env)?,
                None => 0.0,
            };
            apply_func(*func, a, b, ast.span)
        }
        ExprKind::Compare { .. } | ExprKind::Not(_) | ExprKind::And(..) | ExprKind::Or(..) => {
            Err(EvalError::NotNumeric { span: ast.span })
        }
    }
}

pub(crate) fn apply_binary(op: BinOp, a: f64, b: f64, span: Span) -> Result<f64, EvalError> {
    Ok(match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => a / b,
        BinOp::Pow => {
            if a < 0.0 && b.fract() != 0.0 && b.is_finite() {
                return Err(EvalError::Domain {
                    message: format!("negative base {a} raised to non-integer power {b}"),
                    span,
                });
            }
            a.powf(b)
        }
    })
}

pub(crate) fn apply_func(func: Func, a: f64, b: f64, span: Span) -> Result<f64, EvalError> {
    let domain = |message: String| Err(EvalError::Domain { message, span });
    Ok(match func {
        Func::Sin => a.sin(),
        Func::Cos => a.cos(),
        Func::Tan => a.tan(),
        Func::Asin | Func::Acos if !(-1.0..=1.0).contains(&a) => {
            return domain(format!("{}({a}) is outside [-1, 1]", func.name()))
        }
        Func::Asin => a.asin(),
        Func::Acos => a.acos(),
        Func::Atan => a.atan(),
        Func::Exp => a.exp(),
        Func::Log if a <= 0.0 => return domain(format!("log of non-positive value {a}")),
        Func::Log => a.ln(),
        Func::Sqrt if a < 0.0 => return domain(format!("sqrt of negative value {a}")),
        Func::Sqrt => a.sqrt(),
        Func::Abs => a.abs(),
        Func::Min => a.min(b),
        Func::Max => a.max(b),
        Func::Floor => a.floor(),
        Func::Ceil => a.ceil(),
        Func::Sign => {
            if a > 0.0 {
                1.0
            } else if a < 0.0 {
                -1.0
            } else {
                a
            }
        }
    })
}

#[derive(Debug, Clone)]
enum Node {
    Const(f64),
    Slot(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>, Span),
    Call1(Func, Box<Node>, Span),
    Call2(Func, Box<Node>, Box<Node>, Span),
}

/// A numeric expression with its variables resolved to positional slots, for
/// hot loops that evaluate the same expression millions of times.
#[derive(Debug, Clone)]
pub struct BoundExpr {
    root: Node,
    arity: usize,
}

impl BoundExpr {
    /// Binds `ast` against `vars`; slot `i` takes `vars[i]`.
    pub fn bind(ast: &Expr, vars: &[&str]) -> Result<BoundExpr, EvalError> {
        Ok(BoundExpr {
            root: compile(ast, vars)?,
            arity: vars.len(),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, values: &[f64]) -> Result<f64, EvalError> {
        debug_assert_eq!(values.len(), self.arity);
        run(&self.root, values)
    }
}

fn compile(ast: &Expr, vars: &[&str]) -> Result<Node, EvalError> {
    Ok(match &ast.kind {
        ExprKind::Number(v) => Node::Const(*v),
        ExprKind::Pi => Node::Const(PI),
        ExprKind::E => Node::Const(E),
        ExprKind::Var(name) => match vars.iter().position(|v| v == name) {
            Some(i) => Node::Slot(i),
            None => {
                return Err(EvalError::Unbound {
                    name: name.clone(),
                    span: ast.span,
                })
            }
        },
        ExprKind::Neg(a) => Node::Neg(Box::new(compile(a, vars)?)),
        ExprKind::Binary { op, lhs, rhs } => Node::Bin(
            *op,
            Box::new(compile(lhs, vars)?),
            Box::new(compile(rhs, vars)?),
            ast.span,
        ),
        ExprKind::Call { func, args } if args.len() == 1 => {
            Node::Call1(*func, Box::new(compile(&args[0], vars)?), ast.span)
        }
        ExprKind::Call { func, args } => Node::Call2(
            *func,
            Box::new(compile(&args[0], vars)?),
            Box::new(compile(&args[1], vars)?),
            ast.span,
        ),
        _ => return Err(EvalError::NotNumeric { span: ast.span }),
    })
}

fn run(n: &Node, vals: &[f64]) -> Result<f64, EvalError> {
    match n {
        Node::Const(v) => Ok(*v),
        Node::Slot(i) => Ok(vals[*i]),
        Node::Neg(a) => Ok(-run(a, vals)?),
        Node::Bin(op, a, b, span) => apply_binary(*op, run(a, vals)?, run(b, vals)?, *span),
        Node::Call1(f, a, span) => apply_func(*f, run(a, vals)?, 0.0, *span),
        Node::Call2(f, a, b, span) => apply_func(*f, run(a, vals)?, run(b, vals)?, *span),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn env(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn eval(src: &str, pairs: &[(&str, f64)]) -> Result<f64, EvalError> {
        eval_scalar(&parse_expression(src).unwrap(), &env(pairs))
    }

    #[test]
    fn nested_sqrt() {
        let v = eval("sqrt(5+sqrt(3))", &[]).unwrap();
        assert!((v - 2.59462).abs() < 5e-6, "{v}");
    }

    #[test]
    fn constant_arithmetic() {
        assert_eq!(eval("2*(3+4)", &[]).unwrap(), 14.0);
        assert_eq!(eval("-2^2", &[]).unwrap(), -4.0);
        assert_eq!(eval("2^3^2", &[]).unwrap(), 512.0);
        assert_eq!(eval("2^-1", &[]).unwrap(), 0.5);
        assert_eq!(eval("(-8)^(1/1)", &[]).unwrap(), -8.0);
        assert_eq!(eval("(-2)^3", &[]).unwrap(), -8.0);
    }

    #[test]
    fn sample_surfaces() {
        assert_eq!(eval("sin(x+y^2)", &[("x", 0.0), ("y", 0.0)]).unwrap(), 0.0);
        assert_eq!(
            eval("(3+cos(v))*cos(u)", &[("u", 0.0), ("v", 0.0)]).unwrap(),
            4.0
        );
    }

    #[test]
    fn domain_errors_carry_spans() {
        let err = eval("1 + log(x)", &[("x", 0.0)]).unwrap_err();
        assert!(matches!(err, EvalError::Domain { span, .. } if span.start == 4));
        assert!(matches!(
            eval("sqrt(-1)", &[]),
            Err(EvalError::Domain { .. })
        ));
        assert!(matches!(
            eval("(-2)^0.5", &[]),
            Err(EvalError::Domain { .. })
        ));
        assert!(matches!(
            eval("asin(2)", &[]),
            Err(EvalError::Domain { .. })
        ));
        assert!(
            matches!(eval("x + 1", &[]), Err(EvalError::Unbound { ref name, .. }) if name == "x")
        );
        assert!(matches!(
            eval("x < 1", &[("x", 0.0)]),
            Err(EvalError::NotNumeric { .. })
        ));
    }

    #[test]
    fn misc_functions() {
        assert_eq!(eval("sign(-3) + sign(0) + sign(2)", &[]).unwrap(), 0.0);
        assert_eq!(
            eval(
                "min(1, 2) + max(1, 2) + floor(1.5) + ceil(1.5) + abs(-1)",
                &[]
            )
            .unwrap(),
            7.0
        );
        assert_eq!(eval("e", &[]).unwrap(), E);
    }

    #[test]
    fn bound_matches_tree_walk() {
        let ast = parse_expression("(3+cos(v))*sin(u) - max(u, v)^2 / exp(u)").unwrap();
        let bound = BoundExpr::bind(&ast, &["u", "v"]).unwrap();
        for (u, v) in [(0.0, 0.0), (1.5, -2.0), (3.0, 0.25)] {
            let a = eval_scalar(&ast, &env(&[("u", u), ("v", v)])).unwrap();
            let b = bound.eval(&[u, v]).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(BoundExpr::bind(&ast, &["u"]).is_err());
    }
}
