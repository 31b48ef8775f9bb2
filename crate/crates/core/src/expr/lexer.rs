use super::{ExprError, Span};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Number(v) => format!("number {v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Lt => "'<'".into(),
            Tok::Le => "'<='".into(),
            Tok::Gt => "'>'".into(),
            Tok::Ge => "'>='".into(),
            Tok::EqEq => "'=='".into(),
            Tok::AndAnd => "'&&'".into(),
            Tok::OrOr => "'||'".into(),
            Tok::Bang => "'!'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let syntax = |pos: usize, expected: &str, found: String| ExprError::Syntax {
        position: pos,
        expected: expected.to_string(),
        found,
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = |t: Tok| Token {
            tok: t,
            span: Span::new(start, start + 1),
        };
        let next = chars.get(i + 1).copied();
        match c {
            '+' => {
                out.push(single(Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push(single(Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push(single(Tok::Star));
                i += 1;
            }
            '/' => {
                out.push(single(Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push(single(Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push(single(Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push(single(Tok::RParen));
                i += 1;
            }
            ',' => {
                out.push(single(Tok::Comma));
                i += 1;
            }
            '<' | '>' => {
                let (tok, len) = match (c, next) {
                    ('<', Some('=')) => (Tok::Le, 2),
                    ('<', _) => (Tok::Lt, 1),
                    ('>', Some('=')) => (Tok::Ge, 2),
                    _ => (Tok::Gt, 1),
                };
                out.push(Token {
                    tok,
                    span: Span::new(start, start + len),
                });
                i += len;
            }
            '=' => {
                if next != Some('=') {
                    return Err(syntax(start, "'=='", "'='".into()));
                }
                out.push(Token {
                    tok: Tok::EqEq,
                    span: Span::new(start, start + 2),
                });
                i += 2;
            }
            '&' => {
                if next != Some('&') {
                    return Err(syntax(start, "'&&'", "'&'".into()));
                }
                out.push(Token {
                    tok: Tok::AndAnd,
                    span: Span::new(start, start + 2),
                });
                i += 2;
            }
            '|' => {
                if next != Some('|') {
                    return Err(syntax(start, "'||'", "'|'".into()));
                }
                out.push(Token {
                    tok: Tok::OrOr,
                    span: Span::new(start, start + 2),
                });
                i += 2;
            }
            '!' => {
                out.push(single(Tok::Bang));
                i += 1;
            }
            c if c.is_ascii_digit() || (c == '.' && next.is_some_and(|n| n.is_ascii_digit())) => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j < chars.len() && chars[j] == '.' {
                    j += 1;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                    // otherwise the 'e' starts an identifier, e.g. "2e" is 2 followed by e
                }
                let text: String = chars[i..j].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| syntax(start, "a number", format!("'{text}'")))?;
                out.push(Token {
                    tok: Tok::Number(v),
                    span: Span::new(start, j),
                });
                i = j;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                out.push(Token {
                    tok: Tok::Ident(text),
                    span: Span::new(start, j),
                });
                i = j;
            }
            other => return Err(syntax(start, "an expression", format!("'{other}'"))),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(chars.len(), chars.len()),
    });
    Ok(out)
}
