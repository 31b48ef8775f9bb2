use super::lexer::{tokenize, Tok, Token};
use super::{BinOp, CmpOp, Expr, ExprError, ExprKind, Func, Span, ValueKind};

/// Parses `src` into an expression tree.
///
/// Arithmetic operands must be numeric and logical operands boolean, so a
/// comparison can never end up underneath an arithmetic node.
pub fn parse_expression(src: &str) -> Result<Expr, ExprError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.or()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ExprError {
        ExprError::Syntax {
            position: self.span().start,
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn expect_eof(&self) -> Result<(), ExprError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error("an operator or end of input"))
        }
    }

    fn or(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.and()?;
            lhs = logical(lhs, rhs, ExprKind::Or)?;
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.not()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.not()?;
            lhs = logical(lhs, rhs, ExprKind::And)?;
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Bang {
            let start = self.bump().span;
            let inner = self.not()?;
            require(&inner, ValueKind::Boolean, "'!' needs a boolean operand")?;
            let span = start.join(inner.span);
            return Ok(Expr::new(ExprKind::Not(Box::new(inner)), span));
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<Expr, ExprError> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            Tok::EqEq => CmpOp::Eq,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.sum()?;
        require(
            &lhs,
            ValueKind::Numeric,
            "comparison operands must be numeric",
        )?;
        require(
            &rhs,
            ValueKind::Numeric,
            "comparison operands must be numeric",
        )?;
        let span = lhs.span.join(rhs.span);
        Ok(Expr::new(
            ExprKind::Compare {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            },
            span,
        ))
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            lhs = binary(op, lhs, rhs)?;
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs)?;
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::Minus {
            let start = self.bump().span;
            let inner = self.unary()?;
            require(
                &inner,
                ValueKind::Numeric,
                "unary '-' needs a numeric operand",
            )?;
            let span = start.join(inner.span);
            return Ok(Expr::new(ExprKind::Neg(Box::new(inner)), span));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            // right operand goes through unary so that 2^-1 and 2^3^2 both work
            let exp = self.unary()?;
            return binary(BinOp::Pow, base, exp);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Number(v) => {
                self.bump();
                Ok(Expr::new(ExprKind::Number(v), span))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.or()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("')'"));
                }
                let close = self.bump().span;
                // parentheses don't get their own node but do widen the span
                Ok(Expr {
                    span: span.join(close),
                    ..inner
                })
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    return self.call(name, span);
                }
                let kind = match name.as_str() {
                    "pi" => ExprKind::Pi,
                    "e" => ExprKind::E,
                    _ => ExprKind::Var(name),
                };
                Ok(Expr::new(kind, span))
            }
            _ => Err(self.error("a number, variable, function call or '('")),
        }
    }

    fn call(&mut self, name: String, name_span: Span) -> Result<Expr, ExprError> {
        let func = Func::from_name(&name).ok_or_else(|| ExprError::UnknownFunction {
            name: name.clone(),
            span: name_span,
        })?;
        self.bump(); // '('
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let a = self.or()?;
                require(&a, ValueKind::Numeric, "function arguments must be numeric")?;
                args.push(a);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => break,
                    _ => return Err(self.error("',' or ')'")),
                }
            }
        }
        let close = self.bump().span;
        let span = name_span.join(close);
        if args.len() != func.arity() {
            return Err(ExprError::Arity {
                name,
                expected: func.arity(),
                found: args.len(),
                span,
            });
        }
        Ok(Expr::new(ExprKind::Call { func, args }, span))
    }
}

fn require(e: &Expr, kind: ValueKind, message: &str) -> Result<(), ExprError> {
    if e.value_kind() == kind {
        Ok(())
    } else {
        Err(ExprError::Type {
            message: message.to_string(),
            span: e.span,
        })
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Result<Expr, ExprError> {
    let msg = format!("operands of '{}' must be numeric", op.symbol());
    require(&lhs, ValueKind::Numeric, &msg)?;
    require(&rhs, ValueKind::Numeric, &msg)?;
    let span = lhs.span.join(rhs.span);
    Ok(Expr::new(
        ExprKind::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        },
        span,
    ))
}

fn logical(
    lhs: Expr,
    rhs: Expr,
    make: fn(Box<Expr>, Box<Expr>) -> ExprKind,
) -> Result<Expr, ExprError> {
    require(
        &lhs,
        ValueKind::Boolean,
        "logical operands must be comparisons",
    )?;
    require(
        &rhs,
        ValueKind::Boolean,
        "logical operands must be comparisons",
    )?;
    let span = lhs.span.join(rhs.span);
    Ok(Expr::new(make(Box::new(lhs), Box::new(rhs)), span))
}
