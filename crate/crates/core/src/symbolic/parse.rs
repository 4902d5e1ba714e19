//! Infix expression parser.
//!
//! Accepts `+ - * / ^int`, parentheses, identifiers (optionally shifted as
//! `name[k]`), decimal or integer literals, and the opaque functions
//! `sin cos exp ln`. Unary minus binds weaker than `^`, so `-x^2 = -(x^2)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::expr::{Expr, FuncKind};
use super::symbol::Symbol;
use super::SymbolicError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

struct Lexer<'a> {
    chars: Vec<(usize, char)>,
    src: &'a str,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, (usize, String)> {
    let lx = Lexer {
        chars: src.char_indices().collect(),
        src,
    };
    let mut out = Vec::new();
    let mut i = 0;
    let n = lx.chars.len();
    while i < n {
        let (pos, c) = lx.chars[i];
        let col = lx.src[..pos].chars().count();
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < n && (lx.chars[i].1.is_ascii_digit() || lx.chars[i].1 == '.') {
                i += 1;
            }
            let text: String = lx.chars[start..i].iter().map(|(_, c)| c).collect();
            let value = parse_decimal(&text).ok_or((col, format!("bad number `{text}`")))?;
            out.push((col, Tok::Num(value)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < n && (lx.chars[i].1.is_ascii_alphanumeric() || lx.chars[i].1 == '_') {
                i += 1;
            }
            let mut text: String = lx.chars[start..i].iter().map(|(_, c)| c).collect();
            if i < n && lx.chars[i].1 == '[' {
                let open = i;
                i += 1;
                let ds = i;
                while i < n && lx.chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                if i == ds || i >= n || lx.chars[i].1 != ']' {
                    let c2 = lx.src[..lx.chars[open].0].chars().count();
                    return Err((c2, "expected `[<integer>]` shift".into()));
                }
                let digits: String = lx.chars[ds..i].iter().map(|(_, c)| c).collect();
                let k: u32 = digits
                    .parse()
                    .map_err(|_| (col, format!("bad shift `{digits}`")))?;
                i += 1;
                if k > 0 {
                    text = format!("{text}[{k}]");
                }
            }
            out.push((col, Tok::Ident(text)));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => return Err((col, format!("unexpected character `{c}`"))),
            };
            out.push((col, tok));
            i += 1;
        }
    }
    Ok(out)
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let mut parts = text.split('.');
    let int = parts.next()?;
    let frac = parts.next().unwrap_or("");
    if parts.next().is_some() || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let d = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(n, d))
}

/// Parses a rational literal such as `-3/4` or `0.25`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim_start()),
        None => (false, t),
    };
    let v = match t.split_once('/') {
        Some((a, b)) => {
            let a = parse_decimal(a.trim())?;
            let b = parse_decimal(b.trim())?;
            if b.is_zero() {
                return None;
            }
            a / b
        }
        None => parse_decimal(t)?,
    };
    Some(if neg { -v } else { v })
}

struct Parser<'r> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end_col: usize,
    line: usize,
    col0: usize,
    resolve: &'r dyn Fn(&str) -> Option<Symbol>,
}

impl Parser<'_> {
    fn err(&self, col: usize, msg: impl Into<String>) -> SymbolicError {
        SymbolicError::Parse {
            line: self.line,
            column: self.col0 + col + 1,
            message: msg.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(c, _)| *c)
            .unwrap_or(self.end_col)
    }

    fn expr(&mut self) -> Result<Expr, SymbolicError> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Expr, SymbolicError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            let col = self.col();
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == '*' {
                acc * rhs
            } else {
                acc.checked_div(&rhs)
                    .map_err(|_| self.err(col, "division by zero"))?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, SymbolicError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, SymbolicError> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let col = self.col();
            let neg = if let Some(Tok::Op('-')) = self.peek() {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = match self.peek().cloned() {
                Some(Tok::Num(v)) if v.is_integer() => {
                    self.pos += 1;
                    i32::try_from(v.to_integer())
                        .map_err(|_| self.err(col, "exponent too large"))?
                }
                _ => return Err(self.err(col, "expected an integer exponent")),
            };
            let e = if neg { -e } else { e };
            return base
                .pow(e)
                .map_err(|_| self.err(col, "zero raised to a negative power"));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, SymbolicError> {
        let col = self.col();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::rational(v))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(Tok::LParen) = self.peek() {
                    let kind = FuncKind::from_name(&name)
                        .ok_or_else(|| self.err(col, format!("unknown function `{name}`")))?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Expr::func(kind, arg));
                }
                match (self.resolve)(&name) {
                    Some(s) => Ok(Expr::var(s)),
                    None => Err(self.err(col, format!("undeclared variable `{name}`"))),
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Some(t) => Err(self.err(col, format!("unexpected token {}", describe(&t)))),
            None => Err(self.err(col, "unexpected end of expression")),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), SymbolicError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(self.col(), "expected `)`")),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("`{v}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
    }
}

/// Parses `src`, resolving identifiers through `resolve`.
pub fn parse_expr(
    src: &str,
    resolve: &dyn Fn(&str) -> Option<Symbol>,
) -> Result<Expr, SymbolicError> {
    parse_expr_at(src, 1, 0, resolve)
}

/// Like [`parse_expr`], reporting positions relative to `line` and `col0`.
pub fn parse_expr_at(
    src: &str,
    line: usize,
    col0: usize,
    resolve: &dyn Fn(&str) -> Option<Symbol>,
) -> Result<Expr, SymbolicError> {
    let toks = lex(src).map_err(|(c, m)| SymbolicError::Parse {
        line,
        column: col0 + c + 1,
        message: m,
    })?;
    let end_col = src.trim_end().chars().count().saturating_sub(1);
    let mut p = Parser {
        toks,
        pos: 0,
        end_col,
        line,
        col0,
        resolve,
    };
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        let (c, t) = p.toks[p.pos].clone();
        return Err(p.err(c, format!("unexpected token {}", describe(&t))));
    }
    Ok(e)
}

/// Resolver accepting any identifier.
pub fn any_symbol(name: &str) -> Option<Symbol> {
    Some(Symbol::new(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expr {
        parse_expr(s, &any_symbol).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(p("-x^2"), -(p("x") * p("x")));
        assert_eq!(p("1 + 2*3"), Expr::int(7));
        assert_eq!(
            p("2^-1"),
            Expr::rational(BigRational::new(1.into(), 2.into()))
        );
        assert_eq!(
            p("0.25"),
            Expr::rational(BigRational::new(1.into(), 4.into()))
        );
    }

    #[test]
    fn shifts_and_functions() {
        assert_eq!(p("u1[2]").as_symbol().unwrap().name(), "u1[2]");
        assert_eq!(p("u1[0]").as_symbol().unwrap().name(), "u1");
        assert!(!p("sin(x)").is_rational());
    }

    #[test]
    fn dangling_operator_is_reported() {
        let err = parse_expr("u1 + ", &any_symbol).unwrap_err();
        match err {
            SymbolicError::Parse { column, .. } => assert_eq!(column, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared() {
        let r = parse_expr("x + y", &|n| (n == "x").then(|| Symbol::new(n)));
        assert!(matches!(r, Err(SymbolicError::Parse { .. })));
    }

    #[test]
    fn rational_literals() {
        assert_eq!(
            parse_rational("-3/4"),
            Some(BigRational::new((-3).into(), 4.into()))
        );
        assert_eq!(parse_rational("1/0"), None);
    }
}
