//! Canonical text form of expressions.
//!
//! Printing is precedence-aware and preserves tree shape: a right operand
//! at the same precedence level is parenthesized, so the left-associative
//! parser rebuilds the identical AST. Constants print through Rust's
//! shortest round-trip float formatting.

use super::chart::Chart;
use super::expr::ScalarExpr;
use std::fmt;

const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &ScalarExpr) -> u8 {
    match e {
        ScalarExpr::Add(..) | ScalarExpr::Sub(..) => PREC_ADD,
        ScalarExpr::Mul(..) | ScalarExpr::Div(..) => PREC_MUL,
        ScalarExpr::Neg(..) => PREC_NEG,
        ScalarExpr::Const(v) if *v < 0.0 => PREC_NEG,
        ScalarExpr::Pow(..) => PREC_POW,
        _ => PREC_ATOM,
    }
}

fn fmt_number(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v == v.trunc() && v.abs() < 1e15 {
        write!(f, "{v:.0}")
    } else {
        write!(f, "{v}")
    }
}

fn write_expr(
    f: &mut fmt::Formatter<'_>,
    e: &ScalarExpr,
    min_prec: u8,
    x_dim: usize,
) -> fmt::Result {
    let parens = precedence(e) < min_prec;
    if parens {
        write!(f, "(")?;
    }
    match e {
        ScalarExpr::Const(v) => fmt_number(f, *v)?,
        ScalarExpr::Coord(i) => {
            if *i < x_dim {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "th{}", i - x_dim + 1)?;
            }
        }
        ScalarExpr::Add(a, b) => {
            write_expr(f, a, PREC_ADD, x_dim)?;
            write!(f, " + ")?;
            write_expr(f, b, PREC_ADD + 1, x_dim)?;
        }
        ScalarExpr::Sub(a, b) => {
            write_expr(f, a, PREC_ADD, x_dim)?;
            write!(f, " - ")?;
            write_expr(f, b, PREC_ADD + 1, x_dim)?;
        }
        ScalarExpr::Mul(a, b) => {
            write_expr(f, a, PREC_MUL, x_dim)?;
            write!(f, " * ")?;
            write_expr(f, b, PREC_MUL + 1, x_dim)?;
        }
        ScalarExpr::Div(a, b) => {
            write_expr(f, a, PREC_MUL, x_dim)?;
            write!(f, " / ")?;
            write_expr(f, b, PREC_MUL + 1, x_dim)?;
        }
        ScalarExpr::Neg(a) => {
            write!(f, "-")?;
            write_expr(f, a, PREC_NEG, x_dim)?;
        }
        ScalarExpr::Pow(a, k) => {
            write_expr(f, a, PREC_ATOM, x_dim)?;
            write!(f, "^{k}")?;
        }
        ScalarExpr::Sin(a) => {
            write!(f, "sin(")?;
            write_expr(f, a, 0, x_dim)?;
            write!(f, ")")?;
        }
        ScalarExpr::Cos(a) => {
            write!(f, "cos(")?;
            write_expr(f, a, 0, x_dim)?;
            write!(f, ")")?;
        }
        ScalarExpr::Norm2 { .. } => write!(f, "norm2(x)")?,
        ScalarExpr::Plateau { arg, a, b, c, d } => {
            write!(f, "plateau(")?;
            write_expr(f, arg, 0, x_dim)?;
            write!(f, "; ")?;
            fmt_number(f, *a)?;
            write!(f, ", ")?;
            fmt_number(f, *b)?;
            write!(f, ", ")?;
            fmt_number(f, *c)?;
            write!(f, ", ")?;
            fmt_number(f, *d)?;
            write!(f, ")")?;
        }
        ScalarExpr::Glue { poly, arg } => {
            write!(f, "glue(")?;
            write_expr(f, arg, 0, x_dim)?;
            write!(f, ";")?;
            for (i, c) in poly.iter().enumerate() {
                write!(f, "{}", if i == 0 { " " } else { ", " })?;
                fmt_number(f, *c)?;
            }
            write!(f, ")")?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

struct InChart<'a> {
    expr: &'a ScalarExpr,
    x_dim: usize,
}

impl fmt::Display for InChart<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, 0, self.x_dim)
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Bare expressions print with Euclidean coordinate names; fields
        // and maps print through their chart, which fixes the x/th split.
        write_expr(f, self, 0, usize::MAX)
    }
}

/// Print with the chart's Euclidean/angle coordinate split.
pub fn display_in_chart(e: &ScalarExpr, chart: &Chart) -> String {
    format!(
        "{}",
        InChart {
            expr: e,
            x_dim: chart.x_dim()
        }
    )
}
