//! Recursive-descent parser for the field grammar.
//!
//! ```text
//! expr    := term { ("+" | "-") term }
//! term    := unary { ("*" | "/") unary }
//! unary   := "-" unary | postfix
//! postfix := atom [ "^" [-] integer ]
//! atom    := number | coordinate | call | "(" expr ")" | "[" expr {"," expr} "]"
//! call    := ident "(" ... ")"
//! ```
//!
//! Calls: `norm2(x)`, `jet5(x)`, `sin(e)`, `cos(e)`,
//! `plateau(e; a, b, c, d)`, `glue(e; c0, c1, ...)` and the named field
//! constructors `radial()`, `Jfield()`, `Kfield()`, `Lfield()`. Values are
//! scalars or coordinate vectors; vectors combine by "+"/"-", scale by
//! scalar "*" and "/", and come from constructors or bracket literals.

use super::chart::Chart;
use super::expr::{self, as_const, E};
use super::field::{MapExpr, VFieldExpr};
use crate::error::{Error, Result};
use crate::linalg::RMat;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Eof,
}

struct Lexer;

impl Lexer {
    fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
        let bytes = text.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            match c {
                ' ' | '\t' | '\n' | '\r' => i += 1,
                '+' => {
                    toks.push((Tok::Plus, i));
                    i += 1;
                }
                '-' => {
                    toks.push((Tok::Minus, i));
                    i += 1;
                }
                '*' => {
                    toks.push((Tok::Star, i));
                    i += 1;
                }
                '/' => {
                    toks.push((Tok::Slash, i));
                    i += 1;
                }
                '^' => {
                    toks.push((Tok::Caret, i));
                    i += 1;
                }
                '(' => {
                    toks.push((Tok::LParen, i));
                    i += 1;
                }
                ')' => {
                    toks.push((Tok::RParen, i));
                    i += 1;
                }
                '[' => {
                    toks.push((Tok::LBracket, i));
                    i += 1;
                }
                ']' => {
                    toks.push((Tok::RBracket, i));
                    i += 1;
                }
                ',' => {
                    toks.push((Tok::Comma, i));
                    i += 1;
                }
                ';' => {
                    toks.push((Tok::Semi, i));
                    i += 1;
                }
                '0'..='9' | '.' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                    if i < bytes.len() && bytes[i] == b'.' {
                        i += 1;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                        let mut j = i + 1;
                        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                            j += 1;
                        }
                        if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                            i = j;
                            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                                i += 1;
                            }
                        }
                    }
                    let v: f64 = text[start..i].parse().map_err(|_| Error::Parse {
                        msg: format!("bad number literal `{}`", &text[start..i]),
                        offset: start,
                    })?;
                    toks.push((Tok::Num(v), start));
                }
                'a'..='z' | 'A'..='Z' | '_' => {
                    let start = i;
                    while i < bytes.len()
                        && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    toks.push((Tok::Ident(text[start..i].to_string()), start));
                }
                _ => {
                    return Err(Error::Parse {
                        msg: format!("unexpected character `{c}`"),
                        offset: i,
                    })
                }
            }
        }
        toks.push((Tok::Eof, bytes.len()));
        Ok(toks)
    }
}

#[derive(Debug, Clone)]
enum Value {
    Scalar(E),
    Vector(Vec<E>),
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    chart: &'a Chart,
}

impl<'a> Parser<'a> {
    fn new(text: &str, chart: &'a Chart) -> Result<Self> {
        Ok(Parser {
            toks: Lexer::lex(text)?,
            pos: 0,
            chart,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(Error::Parse {
                msg: format!("expected {what}"),
                offset: self.offset(),
            })
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            msg: msg.into(),
            offset: self.offset(),
        })
    }

    fn expr(&mut self) -> Result<Value> {
        let mut lhs = self.term()?;
        loop {
            let plus = match self.peek() {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => break,
            };
            let off = self.offset();
            self.bump();
            let rhs = self.term()?;
            lhs = match (lhs, rhs) {
                (Value::Scalar(a), Value::Scalar(b)) => {
                    Value::Scalar(if plus { expr::add(a, b) } else { expr::sub(a, b) })
                }
                (Value::Vector(a), Value::Vector(b)) => {
                    if a.len() != b.len() {
                        return Err(Error::Parse {
                            msg: "vector operands of different dimension".into(),
                            offset: off,
                        });
                    }
                    Value::Vector(
                        a.into_iter()
                            .zip(b)
                            .map(|(x, y)| if plus { expr::add(x, y) } else { expr::sub(x, y) })
                            .collect(),
                    )
                }
                _ => {
                    return Err(Error::Parse {
                        msg: "cannot add a scalar and a vector".into(),
                        offset: off,
                    })
                }
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Value> {
        let mut lhs = self.unary()?;
        loop {
            let star = match self.peek() {
                Tok::Star => true,
                Tok::Slash => false,
                _ => break,
            };
            let off = self.offset();
            self.bump();
            let rhs = self.unary()?;
            lhs = match (lhs, rhs, star) {
                (Value::Scalar(a), Value::Scalar(b), true) => Value::Scalar(expr::mul(a, b)),
                (Value::Scalar(a), Value::Scalar(b), false) => Value::Scalar(expr::div(a, b)),
                (Value::Scalar(a), Value::Vector(v), true) => Value::Vector(
                    v.into_iter().map(|c| expr::mul(a.clone(), c)).collect(),
                ),
                (Value::Vector(v), Value::Scalar(a), true) => Value::Vector(
                    v.into_iter().map(|c| expr::mul(c, a.clone())).collect(),
                ),
                (Value::Vector(v), Value::Scalar(a), false) => Value::Vector(
                    v.into_iter().map(|c| expr::div(c, a.clone())).collect(),
                ),
                _ => {
                    return Err(Error::Parse {
                        msg: "invalid scalar/vector combination for * or /".into(),
                        offset: off,
                    })
                }
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Value> {
        if matches!(self.peek(), Tok::Minus) {
            self.bump();
            return Ok(match self.unary()? {
                Value::Scalar(a) => Value::Scalar(expr::neg(a)),
                Value::Vector(v) => Value::Vector(v.into_iter().map(expr::neg).collect()),
            });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Value> {
        let base = self.atom()?;
        if matches!(self.peek(), Tok::Caret) {
            self.bump();
            let mut sign = 1i32;
            if matches!(self.peek(), Tok::Minus) {
                self.bump();
                sign = -1;
            }
            let off = self.offset();
            let k = match self.bump().0 {
                Tok::Num(v) if v == v.trunc() && v.abs() <= i32::MAX as f64 => v as i32,
                _ => {
                    return Err(Error::Parse {
                        msg: "exponent must be an integer literal".into(),
                        offset: off,
                    })
                }
            };
            return match base {
                Value::Scalar(a) => Ok(Value::Scalar(expr::pow(a, sign * k))),
                Value::Vector(_) => Err(Error::Parse {
                    msg: "cannot raise a vector to a power".into(),
                    offset: off,
                }),
            };
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Value> {
        let off = self.offset();
        match self.bump().0 {
            Tok::Num(v) => Ok(Value::Scalar(expr::konst(v))),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::LBracket => {
                let mut comps = Vec::new();
                loop {
                    match self.expr()? {
                        Value::Scalar(e) => comps.push(e),
                        Value::Vector(_) => {
                            return self.err("vector literals take scalar components")
                        }
                    }
                    if matches!(self.peek(), Tok::Comma) {
                        self.bump();
                    } else {
                        break;
                    }
                }
                self.expect(&Tok::RBracket, "`]`")?;
                Ok(Value::Vector(comps))
            }
            Tok::Ident(name) => {
                if matches!(self.peek(), Tok::LParen) {
                    self.bump();
                    self.call(&name, off)
                } else {
                    match self.chart.coord_index(&name) {
                        Some(i) => Ok(Value::Scalar(expr::coord(i))),
                        None => Err(Error::UnknownIdentifier { name, offset: off }),
                    }
                }
            }
            Tok::Eof => self.err("unexpected end of input"),
            other => Err(Error::Parse {
                msg: format!("unexpected token {other:?}"),
                offset: off,
            }),
        }
    }

    fn scalar_arg(&mut self) -> Result<E> {
        match self.expr()? {
            Value::Scalar(e) => Ok(e),
            Value::Vector(_) => self.err("expected a scalar argument"),
        }
    }

    fn const_arg(&mut self, what: &str) -> Result<f64> {
        let off = self.offset();
        let e = self.scalar_arg()?;
        as_const(&e).ok_or(Error::Parse {
            msg: format!("{what} must be a constant"),
            offset: off,
        })
    }

    fn call(&mut self, name: &str, off: usize) -> Result<Value> {
        match name {
            "sin" | "cos" => {
                let a = self.scalar_arg()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(Value::Scalar(if name == "sin" {
                    expr::sin(a)
                } else {
                    expr::cos(a)
                }))
            }
            "norm2" | "jet5" => {
                // sole argument is the literal coordinate tuple `x`
                let arg_off = self.offset();
                match self.bump().0 {
                    Tok::Ident(id) if id == "x" => {}
                    _ => {
                        return Err(Error::Parse {
                            msg: format!("`{name}` takes the coordinate tuple `x`"),
                            offset: arg_off,
                        })
                    }
                }
                self.expect(&Tok::RParen, "`)`")?;
                let dim = self.chart.x_dim();
                Ok(Value::Scalar(if name == "norm2" {
                    expr::norm2(dim)
                } else {
                    expr::jet5(dim)
                }))
            }
            "plateau" => {
                let arg = self.scalar_arg()?;
                self.expect(&Tok::Semi, "`;` before plateau parameters")?;
                let a = self.const_arg("plateau parameter")?;
                self.expect(&Tok::Comma, "`,`")?;
                let b = self.const_arg("plateau parameter")?;
                self.expect(&Tok::Comma, "`,`")?;
                let c = self.const_arg("plateau parameter")?;
                self.expect(&Tok::Comma, "`,`")?;
                let d = self.const_arg("plateau parameter")?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(Value::Scalar(expr::plateau(arg, a, b, c, d).map_err(
                    |e| Error::Parse {
                        msg: e.to_string(),
                        offset: off,
                    },
                )?))
            }
            "glue" => {
                let arg = self.scalar_arg()?;
                self.expect(&Tok::Semi, "`;` before glue coefficients")?;
                let mut poly = vec![self.const_arg("glue coefficient")?];
                while matches!(self.peek(), Tok::Comma) {
                    self.bump();
                    poly.push(self.const_arg("glue coefficient")?);
                }
                self.expect(&Tok::RParen, "`)`")?;
                Ok(Value::Scalar(expr::glue(poly, arg)))
            }
            "radial" => {
                self.expect(&Tok::RParen, "`)`")?;
                Ok(Value::Vector(radial_components(self.chart)))
            }
            "Jfield" | "Kfield" | "Lfield" => {
                self.expect(&Tok::RParen, "`)`")?;
                let comps = structure_field_components(self.chart, name).map_err(|e| {
                    match e {
                        Error::InvalidInput(msg) => Error::Parse { msg, offset: off },
                        other => other,
                    }
                })?;
                Ok(Value::Vector(comps))
            }
            _ => Err(Error::UnknownIdentifier {
                name: name.to_string(),
                offset: off,
            }),
        }
    }
}

/// Components of the radial field on the chart's Euclidean factor.
pub fn radial_components(chart: &Chart) -> Vec<E> {
    let k = chart.x_dim();
    (0..chart.dim())
        .map(|i| if i < k { expr::coord(i) } else { expr::konst(0.0) })
        .collect()
}

/// Components of x -> A x for a constant matrix, with unit coefficients
/// kept as bare (possibly negated) coordinates.
pub fn linear_field_components(a: &RMat) -> Vec<E> {
    let n = a.nrows();
    (0..n)
        .map(|i| {
            let mut acc = expr::konst(0.0);
            for j in 0..n {
                let c = a[(i, j)];
                if c == 0.0 {
                    continue;
                }
                let term = if c == 1.0 {
                    expr::coord(j)
                } else if c == -1.0 {
                    expr::neg(expr::coord(j))
                } else {
                    expr::mul(expr::konst(c), expr::coord(j))
                };
                acc = expr::add(acc, term);
            }
            acc
        })
        .collect()
}

fn structure_field_components(chart: &Chart, name: &str) -> Result<Vec<E>> {
    let dim = match chart {
        Chart::Euclidean { dim, .. } => *dim,
        Chart::ProductRT { .. } => {
            return Err(Error::InvalidInput(format!(
                "`{name}` lives on Euclidean charts"
            )))
        }
    };
    match name {
        "Jfield" => {
            if dim % 2 != 0 || dim == 0 {
                return Err(Error::InvalidInput(format!(
                    "`Jfield` needs an even dimension, chart has {dim}"
                )));
            }
            let mut comps = Vec::with_capacity(dim);
            for j in 0..dim / 2 {
                comps.push(expr::neg(expr::coord(2 * j + 1)));
                comps.push(expr::coord(2 * j));
            }
            Ok(comps)
        }
        "Kfield" | "Lfield" => {
            if dim % 4 != 0 || dim == 0 {
                return Err(Error::InvalidInput(format!(
                    "`{name}` needs a dimension divisible by 4, chart has {dim}"
                )));
            }
            let st = crate::lie::quaternion_structures(dim / 4);
            let m = if name == "Kfield" { &st[1] } else { &st[2] };
            Ok(linear_field_components(m))
        }
        _ => unreachable!(),
    }
}

fn run_parser(text: &str, chart: &Chart) -> Result<Value> {
    let mut p = Parser::new(text, chart)?;
    let v = p.expr()?;
    if !matches!(p.peek(), Tok::Eof) {
        return Err(Error::Parse {
            msg: "trailing input".into(),
            offset: p.offset(),
        });
    }
    Ok(v)
}

pub fn parse_scalar(text: &str, chart: &Chart) -> Result<E> {
    match run_parser(text, chart)? {
        Value::Scalar(e) => Ok(e),
        Value::Vector(_) => Err(Error::Parse {
            msg: "expected a scalar expression, found a vector".into(),
            offset: 0,
        }),
    }
}

pub fn parse_field(text: &str, chart: &Chart) -> Result<VFieldExpr> {
    match run_parser(text, chart)? {
        Value::Vector(comps) => VFieldExpr::new(*chart, comps),
        Value::Scalar(_) => Err(Error::Parse {
            msg: "expected a vector field, found a scalar (wrap components in [..])".into(),
            offset: 0,
        }),
    }
}

pub fn parse_map(text: &str, chart: &Chart) -> Result<MapExpr> {
    match run_parser(text, chart)? {
        Value::Vector(comps) => MapExpr::new(*chart, comps),
        Value::Scalar(_) => Err(Error::Parse {
            msg: "expected a map, found a scalar (wrap components in [..])".into(),
            offset: 0,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::print::display_in_chart;

    #[test]
    fn radial_constructor_parses() {
        let chart = Chart::euclidean(3);
        let f = parse_field("radial()", &chart).unwrap();
        assert_eq!(f.evaluate(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn example_74_field_parses() {
        let chart = Chart::euclidean(4);
        let f = parse_field("(norm2(x) - 1) * Jfield()", &chart).unwrap();
        // at 2 e1 (complex coordinates pair (x1,x2)): (|x|^2 - 1) J x
        let v = f.evaluate(&[2.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(v, vec![0.0, 6.0, 0.0, 0.0]);
    }

    #[test]
    fn syntax_error_offset() {
        let chart = Chart::euclidean(2);
        let err = parse_field("(x1 +", &chart).unwrap_err();
        match err {
            Error::Parse { offset, .. } => assert_eq!(offset, 5),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier_offset() {
        let chart = Chart::euclidean(2);
        let err = parse_scalar("x1 + bogus", &chart).unwrap_err();
        match err {
            Error::UnknownIdentifier { name, offset } => {
                assert_eq!(name, "bogus");
                assert_eq!(offset, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_coordinate_rejected() {
        let chart = Chart::euclidean(2);
        assert!(parse_scalar("x3", &chart).is_err());
    }

    #[test]
    fn printed_form_reparses_identically() {
        let chart = Chart::product_rt(2, 1);
        let texts = [
            "x1 + x2 * sin(th1)",
            "[x1, x2, cos(2 * th1)]",
            "plateau(norm2(x); 0, 1, 2, 3) * x1",
            "x1^2 - x2^-1",
            "-(x1 + x2)",
            "1 / 2 * x1",
        ];
        for t in texts {
            let parsed = run_parser(t, &chart).unwrap();
            match parsed {
                Value::Scalar(e) => {
                    let printed = display_in_chart(&e, &chart);
                    let again = parse_scalar(&printed, &chart).unwrap();
                    assert_eq!(e, again, "{t} -> {printed}");
                }
                Value::Vector(_) => {
                    let f = parse_field(t, &chart).unwrap();
                    let printed = f.to_string();
                    let again = parse_field(&printed, &chart).unwrap();
                    assert_eq!(f, again, "{t} -> {printed}");
                }
            }
        }
    }

    #[test]
    fn torus_field_text_requires_periodicity() {
        let chart = Chart::product_rt(1, 1);
        assert!(parse_field("[x1, th1]", &chart).is_err());
        assert!(parse_field("[x1, sin(th1) + 1]", &chart).is_ok());
        // map with winding is fine
        assert!(parse_map("[x1, th1 + x1^2]", &chart).is_ok());
    }
}
