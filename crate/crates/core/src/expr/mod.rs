//! The scene language's arithmetic and boolean expressions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! or      := and ( "||" and )*
//! and     := not ( "&&" not )*
//! not     := "!" not | cmp
//! cmp     := sum ( ("<" | "<=" | ">" | ">=" | "==") sum )?
//! sum     := product ( ("+" | "-") product )*
//! product := unary ( ("*" | "/") unary )*
//! unary   := "-" unary | power
//! power   := primary ( "^" unary )?          (right-associative)
//! primary := number | "pi" | "e" | ident | ident "(" args ")" | "(" or ")"
//! ```
//!
//! Unary minus binds looser than `^`, so `-2^2` is `-(2^2)`. Function names
//! are lowercase and case-sensitive; `pi` and `e` are reserved.

mod eval;
mod field;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

pub use eval::{eval_scalar, BoundExpr, EvalError};
pub use field::to_signed_field;
pub use parser::parse_expression;

/// Character offsets `[start, end)` into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, o: Span) -> Span {
        Span {
            start: self.start.min(o.start),
            end: self.end.max(o.end),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Asin,
    Acos,
    Atan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
    Floor,
    Ceil,
    Sign,
}

impl Func {
    pub const ALL: [Func; 15] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Asin,
        Func::Acos,
        Func::Atan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
        Func::Min,
        Func::Max,
        Func::Floor,
        Func::Ceil,
        Func::Sign,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Asin => "asin",
            Func::Acos => "acos",
            Func::Atan => "atan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Floor => "floor",
            Func::Ceil => "ceil",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ExprKind {
    Number(f64),
    Pi,
    E,
    Var(String),
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        args: Vec<Expr>,
    },
    Compare {
        op: CmpOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

/// A parsed expression. Equality is structural and ignores spans.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for Expr {
    fn eq(&self, o: &Expr) -> bool {
        use ExprKind::*;
        match (&self.kind, &o.kind) {
            (Number(a), Number(b)) => a.to_bits() == b.to_bits(),
            (Pi, Pi) | (E, E) => true,
            (Var(a), Var(b)) => a == b,
            (Neg(a), Neg(b)) | (Not(a), Not(b)) => a == b,
            (
                Binary {
                    op: o1,
                    lhs: l1,
                    rhs: r1,
                },
                Binary {
                    op: o2,
                    lhs: l2,
                    rhs: r2,
                },
            ) => o1 == o2 && l1 == l2 && r1 == r2,
            (
                Compare {
                    op: o1,
                    lhs: l1,
                    rhs: r1,
                },
                Compare {
                    op: o2,
                    lhs: l2,
                    rhs: r2,
                },
            ) => o1 == o2 && l1 == l2 && r1 == r2,
            (Call { func: f1, args: a1 }, Call { func: f2, args: a2 }) => f1 == f2 && a1 == a2,
            (And(a1, b1), And(a2, b2)) | (Or(a1, b1), Or(a2, b2)) => a1 == a2 && b1 == b2,
            _ => false,
        }
    }
}

/// Whether an expression yields a number or a truth value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    Numeric,
    Boolean,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn value_kind(&self) -> ValueKind {
        match self.kind {
            ExprKind::Compare { .. } | ExprKind::Not(_) | ExprKind::And(..) | ExprKind::Or(..) => {
                ValueKind::Boolean
            }
            _ => ValueKind::Numeric,
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Number(_) | ExprKind::Pi | ExprKind::E | ExprKind::Var(_) => vec![],
            ExprKind::Neg(a) | ExprKind::Not(a) => vec![a],
            ExprKind::Binary { lhs, rhs, .. } | ExprKind::Compare { lhs, rhs, .. } => {
                vec![lhs, rhs]
            }
            ExprKind::And(a, b) | ExprKind::Or(a, b) => vec![a, b],
            ExprKind::Call { args, .. } => args.iter().collect(),
        }
    }

    /// Variable names in first-occurrence order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if let ExprKind::Var(name) = &e.kind {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            let mut ch = e.children();
            ch.reverse();
            stack.extend(ch);
        }
        out
    }

    /// Fails on the first variable not in `allowed`.
    pub fn check_variables(&self, allowed: &[&str]) -> Result<(), ExprError> {
        let mut stack = vec![self];
        while let Some(e) = stack.pop() {
            if let ExprKind::Var(name) = &e.kind {
                if !allowed.contains(&name.as_str()) {
                    return Err(ExprError::UndeclaredVariable {
                        name: name.clone(),
                        allowed: allowed.iter().map(|s| s.to_string()).collect(),
                        span: e.span,
                    });
                }
            }
            stack.extend(e.children());
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesized, so re-parsing gives back the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Number(v) if *v < 0.0 => write!(f, "(-{})", -v),
            ExprKind::Number(v) => write!(f, "{v}"),
            ExprKind::Pi => f.write_str("pi"),
            ExprKind::E => f.write_str("e"),
            ExprKind::Var(name) => f.write_str(name),
            ExprKind::Neg(a) => write!(f, "(-{a})"),
            ExprKind::Binary { op, lhs, rhs } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            ExprKind::Compare { op, lhs, rhs } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            ExprKind::Call { func, args } => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            ExprKind::Not(a) => write!(f, "(!{a})"),
            ExprKind::And(a, b) => write!(f, "({a} && {b})"),
            ExprKind::Or(a, b) => write!(f, "({a} || {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("unknown function '{name}' at position {}", span.start)]
    UnknownFunction { name: String, span: Span },
    #[error("function '{name}' takes {expected} argument(s), got {found} (position {})", span.start)]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        span: Span,
    },
    #[error("{message} at position {}", span.start)]
    Type { message: String, span: Span },
    #[error("variable '{name}' at position {} is not one of {allowed:?}", span.start)]
    UndeclaredVariable {
        name: String,
        allowed: Vec<String>,
        span: Span,
    },
    #[error("equality at position {} cannot define a solid region; use an iso_shell object instead", span.start)]
    EqualityInRegion { span: Span },
    #[error("expected a boolean predicate, found a numeric expression")]
    NotAPredicate { span: Span },
}

impl ExprError {
    /// Character offset the error points at.
    pub fn position(&self) -> usize {
        match self {
            ExprError::Syntax { position, .. } => *position,
            ExprError::UnknownFunction { span, .. }
            | ExprError::Arity { span, .. }
            | ExprError::Type { span, .. }
            | ExprError::UndeclaredVariable { span, .. }
            | ExprError::EqualityInRegion { span }
            | ExprError::NotAPredicate { span } => span.start,
        }
    }
}
