//! Parenthesized prefix text format.
//!
//! ```text
//! expr     := integer | integer "/" integer | float | coord | "$" param
//!           | "(" op expr+ ")" | "(pw" expr "(" float* ")" expr+ ")"
//! op       := "+" | "*" | "^" | "neg" | "sin" | "cos" | "sqrt"
//! coord    := [A-Za-z_][A-Za-z0-9_]*
//! float    := Rust shortest round-trip form; always contains "." or "e"
//! ```
//!
//! `(^ base k)` takes an integer or half-integer exponent written as
//! `k` or `k/2`. Output is deterministic and parses back to the same tree.

use num_rational::Rational64;

use super::expr::{Exponent, Expr, Node};
use super::ExprError;

pub fn to_text(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

pub(crate) fn float_token(x: f64) -> String {
    let s = format!("{x:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    match e.node() {
        Node::Rational(q) => {
            if q.is_integer() {
                out.push_str(&q.numer().to_string());
            } else {
                out.push_str(&format!("{}/{}", q.numer(), q.denom()));
            }
        }
        Node::Float(x) => out.push_str(&float_token(*x)),
        Node::Coord(c) => out.push_str(c),
        Node::Param(p) => {
            out.push('$');
            out.push_str(p);
        }
        Node::Sum(v) => write_list("+", v, out),
        Node::Product(v) => write_list("*", v, out),
        Node::Pow(b, k) => {
            out.push_str("(^ ");
            write_expr(b, out);
            out.push(' ');
            out.push_str(&k.to_string());
            out.push(')');
        }
        Node::Neg(u) => write_list("neg", std::slice::from_ref(u), out),
        Node::Sin(u) => write_list("sin", std::slice::from_ref(u), out),
        Node::Cos(u) => write_list("cos", std::slice::from_ref(u), out),
        Node::Sqrt(u) => write_list("sqrt", std::slice::from_ref(u), out),
        Node::Piecewise {
            selector,
            breaks,
            pieces,
        } => {
            out.push_str("(pw ");
            write_expr(selector, out);
            out.push_str(" (");
            let b: Vec<String> = breaks.iter().map(|x| float_token(*x)).collect();
            out.push_str(&b.join(" "));
            out.push(')');
            for p in pieces {
                out.push(' ');
                write_expr(p, out);
            }
            out.push(')');
        }
    }
}

fn write_list(op: &str, items: &[Expr], out: &mut String) {
    out.push('(');
    out.push_str(op);
    for it in items {
        out.push(' ');
        write_expr(it, out);
    }
    out.push(')');
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Token {
    Open,
    Close,
    Atom(String),
}

pub(crate) fn tokenize(src: &str) -> Vec<Token> {
    let mut toks = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, toks: &mut Vec<Token>| {
        if !cur.is_empty() {
            toks.push(Token::Atom(std::mem::take(cur)));
        }
    };
    for ch in src.chars() {
        match ch {
            '(' => {
                flush(&mut cur, &mut toks);
                toks.push(Token::Open);
            }
            ')' => {
                flush(&mut cur, &mut toks);
                toks.push(Token::Close);
            }
            c if c.is_whitespace() => flush(&mut cur, &mut toks),
            c => cur.push(c),
        }
    }
    flush(&mut cur, &mut toks);
    toks
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(src);
    let mut pos = 0;
    let e = parse_expr(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(ExprError::Parse(format!("trailing input at token {pos}")));
    }
    Ok(e)
}

pub(crate) fn parse_expr(toks: &[Token], pos: &mut usize) -> Result<Expr, ExprError> {
    match toks.get(*pos) {
        None => Err(ExprError::Parse("unexpected end of input".into())),
        Some(Token::Close) => Err(ExprError::Parse(format!("unexpected `)` at token {pos}"))),
        Some(Token::Atom(a)) => {
            *pos += 1;
            parse_atom(a)
        }
        Some(Token::Open) => {
            *pos += 1;
            let op = match toks.get(*pos) {
                Some(Token::Atom(a)) => a.clone(),
                _ => return Err(ExprError::Parse("expected operator after `(`".into())),
            };
            *pos += 1;
            let node = match op.as_str() {
                "+" | "*" => {
                    let args = parse_args(toks, pos)?;
                    if args.len() < 2 {
                        return Err(ExprError::Parse(format!(
                            "`{op}` needs two or more operands"
                        )));
                    }
                    if op == "+" {
                        Node::Sum(args)
                    } else {
                        Node::Product(args)
                    }
                }
                "^" => {
                    let base = parse_expr(toks, pos)?;
                    let k = match toks.get(*pos) {
                        Some(Token::Atom(a)) => parse_exponent(a)?,
                        _ => return Err(ExprError::Parse("expected exponent".into())),
                    };
                    *pos += 1;
                    expect_close(toks, pos)?;
                    Node::Pow(base, k)
                }
                "neg" | "sin" | "cos" | "sqrt" => {
                    let u = parse_expr(toks, pos)?;
                    expect_close(toks, pos)?;
                    match op.as_str() {
                        "neg" => Node::Neg(u),
                        "sin" => Node::Sin(u),
                        "cos" => Node::Cos(u),
                        _ => Node::Sqrt(u),
                    }
                }
                "pw" => {
                    let selector = parse_expr(toks, pos)?;
                    if toks.get(*pos) != Some(&Token::Open) {
                        return Err(ExprError::Parse("expected break list".into()));
                    }
                    *pos += 1;
                    let mut breaks = Vec::new();
                    while let Some(Token::Atom(a)) = toks.get(*pos) {
                        breaks.push(
                            a.parse::<f64>()
                                .map_err(|_| ExprError::Parse(format!("bad break `{a}`")))?,
                        );
                        *pos += 1;
                    }
                    expect_close(toks, pos)?;
                    let pieces = parse_args(toks, pos)?;
                    if pieces.len() != breaks.len() + 1 || breaks.is_empty() {
                        return Err(ExprError::Parse(
                            "piece count must be break count + 1".into(),
                        ));
                    }
                    Node::Piecewise {
                        selector,
                        breaks,
                        pieces,
                    }
                }
                other => return Err(ExprError::Parse(format!("unknown operator `{other}`"))),
            };
            Ok(Expr::raw(node))
        }
    }
}

fn parse_args(toks: &[Token], pos: &mut usize) -> Result<Vec<Expr>, ExprError> {
    let mut args = Vec::new();
    loop {
        match toks.get(*pos) {
            Some(Token::Close) => {
                *pos += 1;
                return Ok(args);
            }
            None => return Err(ExprError::Parse("unclosed `(`".into())),
            _ => args.push(parse_expr(toks, pos)?),
        }
    }
}

fn expect_close(toks: &[Token], pos: &mut usize) -> Result<(), ExprError> {
    if toks.get(*pos) == Some(&Token::Close) {
        *pos += 1;
        Ok(())
    } else {
        Err(ExprError::Parse(format!("expected `)` at token {pos}")))
    }
}

fn parse_exponent(a: &str) -> Result<Exponent, ExprError> {
    let (n, d) = match a.split_once('/') {
        Some((n, d)) => (n, d),
        None => (a, "1"),
    };
    let n: i64 = n
        .parse()
        .map_err(|_| ExprError::Parse(format!("bad exponent `{a}`")))?;
    let d: i64 = d
        .parse()
        .map_err(|_| ExprError::Parse(format!("bad exponent `{a}`")))?;
    Exponent::new(n, d)
}

fn parse_atom(a: &str) -> Result<Expr, ExprError> {
    if let Some(p) = a.strip_prefix('$') {
        if is_ident(p) {
            return Ok(Expr::param(p));
        }
        return Err(ExprError::Parse(format!("bad parameter `{a}`")));
    }
    if is_ident(a) && !matches!(a, "inf" | "NaN") {
        return Ok(Expr::coord(a));
    }
    if let Some((n, d)) = a.split_once('/') {
        let n: i64 = n
            .parse()
            .map_err(|_| ExprError::Parse(format!("bad rational `{a}`")))?;
        let d: i64 = d
            .parse()
            .map_err(|_| ExprError::Parse(format!("bad rational `{a}`")))?;
        if d == 0 {
            return Err(ExprError::Parse(format!("zero denominator in `{a}`")));
        }
        return Ok(Expr::raw(Node::Rational(Rational64::new(n, d))));
    }
    if a.contains(['.', 'e', 'E']) || a.contains("inf") || a.contains("NaN") {
        return a
            .parse::<f64>()
            .map(Expr::float)
            .map_err(|_| ExprError::Parse(format!("bad float `{a}`")));
    }
    a.parse::<i64>()
        .map(Expr::int)
        .map_err(|_| ExprError::Parse(format!("bad token `{a}`")))
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
