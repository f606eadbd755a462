//! Scalar expression trees over chart coordinates.
//!
//! The AST is closed under exact differentiation. The only non-classical
//! node is `Glue`, the building block of the plateau primitive:
//!
//!   glue_p(u) = exp(-1/u) * p(1/u)  for u > 0,  0 otherwise,
//!
//! with p a polynomial. Its derivative is glue_q with q(w) = w^2 (p - p'),
//! so repeated differentiation stays inside the AST. The smooth step and
//! the plateau are rational combinations of glue terms.
//!
//! All construction goes through the smart constructors below, which fold
//! constants and 0/1 identities and nothing else. Trees built that way
//! print and re-parse to identical trees.

use std::sync::Arc;

pub type E = Arc<ScalarExpr>;

#[derive(Debug, Clone, PartialEq)]
pub enum ScalarExpr {
    Const(f64),
    Coord(usize),
    Add(E, E),
    Sub(E, E),
    Mul(E, E),
    Div(E, E),
    Neg(E),
    Pow(E, i32),
    Sin(E),
    Cos(E),
    /// Sum of squares of the first `dim` (Euclidean) coordinates.
    Norm2 { dim: usize },
    /// Smooth plateau in one scalar argument: 0 for t <= a, 1 on [b, c],
    /// 0 for t >= d.
    Plateau { arg: E, a: f64, b: f64, c: f64, d: f64 },
    /// exp(-1/u) p(1/u) for u > 0, 0 otherwise; `poly` holds p's
    /// coefficients in increasing degree.
    Glue { poly: Vec<f64>, arg: E },
}

pub fn konst(v: f64) -> E {
    Arc::new(ScalarExpr::Const(v))
}

pub fn coord(i: usize) -> E {
    Arc::new(ScalarExpr::Coord(i))
}

pub fn add(a: E, b: E) -> E {
    match (&*a, &*b) {
        (ScalarExpr::Const(x), ScalarExpr::Const(y)) => konst(x + y),
        (ScalarExpr::Const(x), _) if *x == 0.0 => b,
        (_, ScalarExpr::Const(y)) if *y == 0.0 => a,
        _ => Arc::new(ScalarExpr::Add(a, b)),
    }
}

pub fn sub(a: E, b: E) -> E {
    match (&*a, &*b) {
        (ScalarExpr::Const(x), ScalarExpr::Const(y)) => konst(x - y),
        (_, ScalarExpr::Const(y)) if *y == 0.0 => a,
        (ScalarExpr::Const(x), _) if *x == 0.0 => neg(b),
        _ => Arc::new(ScalarExpr::Sub(a, b)),
    }
}

pub fn mul(a: E, b: E) -> E {
    match (&*a, &*b) {
        (ScalarExpr::Const(x), ScalarExpr::Const(y)) => konst(x * y),
        (ScalarExpr::Const(x), _) if *x == 0.0 => konst(0.0),
        (_, ScalarExpr::Const(y)) if *y == 0.0 => konst(0.0),
        (ScalarExpr::Const(x), _) if *x == 1.0 => b,
        (_, ScalarExpr::Const(y)) if *y == 1.0 => a,
        _ => Arc::new(ScalarExpr::Mul(a, b)),
    }
}

pub fn div(a: E, b: E) -> E {
    match (&*a, &*b) {
        (ScalarExpr::Const(x), ScalarExpr::Const(y)) if *y != 0.0 => konst(x / y),
        (_, ScalarExpr::Const(y)) if *y == 1.0 => a,
        _ => Arc::new(ScalarExpr::Div(a, b)),
    }
}

pub fn neg(a: E) -> E {
    match &*a {
        ScalarExpr::Const(x) => konst(-x),
        ScalarExpr::Neg(inner) => inner.clone(),
        _ => Arc::new(ScalarExpr::Neg(a)),
    }
}

pub fn pow(a: E, k: i32) -> E {
    match (&*a, k) {
        (_, 1) => a,
        (_, 0) => konst(1.0),
        (ScalarExpr::Const(x), _) => konst(x.powi(k)),
        _ => Arc::new(ScalarExpr::Pow(a, k)),
    }
}

pub fn sin(a: E) -> E {
    match &*a {
        ScalarExpr::Const(x) => konst(x.sin()),
        _ => Arc::new(ScalarExpr::Sin(a)),
    }
}

pub fn cos(a: E) -> E {
    match &*a {
        ScalarExpr::Const(x) => konst(x.cos()),
        _ => Arc::new(ScalarExpr::Cos(a)),
    }
}

pub fn norm2(dim: usize) -> E {
    Arc::new(ScalarExpr::Norm2 { dim })
}

pub fn glue(poly: Vec<f64>, arg: E) -> E {
    Arc::new(ScalarExpr::Glue { poly, arg })
}

/// Smooth step as an explicit tree: g(u) / (g(u) + g(1 - u)) with
/// g = glue_1; equals 0 for u <= 0 and 1 for u >= 1.
pub fn smooth_step(u: E) -> E {
    let g = glue(vec![1.0], u.clone());
    let h = glue(vec![1.0], sub(konst(1.0), u));
    div(g.clone(), add(g, h))
}

pub fn plateau(arg: E, a: f64, b: f64, c: f64, d: f64) -> crate::Result<E> {
    if !(a < b && b <= c && c < d) {
        return Err(crate::Error::InvalidInput(format!(
            "plateau needs a < b <= c < d, got ({a}, {b}, {c}, {d})"
        )));
    }
    Ok(Arc::new(ScalarExpr::Plateau { arg, a, b, c, d }))
}

/// The plateau expanded into rational glue combinations; used by the
/// derivative rule and as the reference semantics of the node.
pub fn expand_plateau(arg: &E, a: f64, b: f64, c: f64, d: f64) -> E {
    let rise = smooth_step(div(sub(arg.clone(), konst(a)), konst(b - a)));
    let fall = smooth_step(div(sub(konst(d), arg.clone()), konst(d - c)));
    mul(rise, fall)
}

/// Compactly supported function with vanishing 4-jet and nonzero 5-jet at
/// the origin: x1^5 windowed by a plateau in |x|^2 that is identically 1
/// on the unit ball and 0 outside radius 2.
pub fn jet5(dim: usize) -> E {
    let window = plateau(norm2(dim), -2.0, -1.0, 1.0, 4.0).expect("valid plateau params");
    mul(pow(coord(0), 5), window)
}

fn horner(poly: &[f64], w: f64) -> f64 {
    poly.iter().rev().fold(0.0, |acc, c| acc * w + c)
}

pub(crate) fn glue_eval(poly: &[f64], u: f64) -> f64 {
    if u.is_nan() {
        return f64::NAN;
    }
    if u <= 0.0 {
        return 0.0;
    }
    let w = 1.0 / u;
    let e = (-w).exp();
    if e == 0.0 {
        return 0.0;
    }
    e * horner(poly, w)
}

impl ScalarExpr {
    pub fn eval(&self, p: &[f64]) -> f64 {
        match self {
            ScalarExpr::Const(v) => *v,
            ScalarExpr::Coord(i) => p[*i],
            ScalarExpr::Add(a, b) => a.eval(p) + b.eval(p),
            ScalarExpr::Sub(a, b) => a.eval(p) - b.eval(p),
            ScalarExpr::Mul(a, b) => a.eval(p) * b.eval(p),
            ScalarExpr::Div(a, b) => a.eval(p) / b.eval(p),
            ScalarExpr::Neg(a) => -a.eval(p),
            ScalarExpr::Pow(a, k) => a.eval(p).powi(*k),
            ScalarExpr::Sin(a) => a.eval(p).sin(),
            ScalarExpr::Cos(a) => a.eval(p).cos(),
            ScalarExpr::Norm2 { dim } => p[..*dim].iter().map(|x| x * x).sum(),
            ScalarExpr::Plateau { arg, a, b, c, d } => {
                let t = arg.eval(p);
                let rise = step_eval((t - a) / (b - a));
                let fall = step_eval((d - t) / (d - c));
                rise * fall
            }
            ScalarExpr::Glue { poly, arg } => glue_eval(poly, arg.eval(p)),
        }
    }
}

/// Numeric smooth step mirroring the `smooth_step` tree operation by
/// operation, so the node and its expansion evaluate identically.
fn step_eval(u: f64) -> f64 {
    let g = glue_eval(&[1.0], u);
    let h = glue_eval(&[1.0], 1.0 - u);
    g / (g + h)
}

/// Exact partial derivative with respect to coordinate `i`.
pub fn differentiate(e: &E, i: usize) -> E {
    match &**e {
        ScalarExpr::Const(_) => konst(0.0),
        ScalarExpr::Coord(j) => konst(if *j == i { 1.0 } else { 0.0 }),
        ScalarExpr::Add(a, b) => add(differentiate(a, i), differentiate(b, i)),
        ScalarExpr::Sub(a, b) => sub(differentiate(a, i), differentiate(b, i)),
        ScalarExpr::Mul(a, b) => add(
            mul(differentiate(a, i), b.clone()),
            mul(a.clone(), differentiate(b, i)),
        ),
        ScalarExpr::Div(a, b) => {
            let num = sub(
                mul(differentiate(a, i), b.clone()),
                mul(a.clone(), differentiate(b, i)),
            );
            div(num, pow(b.clone(), 2))
        }
        ScalarExpr::Neg(a) => neg(differentiate(a, i)),
        ScalarExpr::Pow(a, k) => mul(
            mul(konst(*k as f64), pow(a.clone(), k - 1)),
            differentiate(a, i),
        ),
        ScalarExpr::Sin(a) => mul(cos(a.clone()), differentiate(a, i)),
        ScalarExpr::Cos(a) => neg(mul(sin(a.clone()), differentiate(a, i))),
        ScalarExpr::Norm2 { dim } => {
            if i < *dim {
                mul(konst(2.0), coord(i))
            } else {
                konst(0.0)
            }
        }
        ScalarExpr::Plateau { arg, a, b, c, d } => {
            differentiate(&expand_plateau(arg, *a, *b, *c, *d), i)
        }
        ScalarExpr::Glue { poly, arg } => {
            // d/du [exp(-1/u) p(1/u)] = exp(-1/u) q(1/u), q = w^2 (p - p')
            let mut q = vec![0.0; poly.len() + 2];
            for (k, ck) in poly.iter().enumerate() {
                q[k + 2] += ck;
                if k >= 1 {
                    q[k + 1] -= ck * k as f64;
                }
            }
            mul(glue(q, arg.clone()), differentiate(arg, i))
        }
    }
}

/// Replace each coordinate by the given expression; `Norm2` nodes expand
/// into explicit sums of squares of the substituted coordinates.
pub fn substitute(e: &E, map: &[E]) -> E {
    match &**e {
        ScalarExpr::Const(v) => konst(*v),
        ScalarExpr::Coord(i) => map[*i].clone(),
        ScalarExpr::Add(a, b) => add(substitute(a, map), substitute(b, map)),
        ScalarExpr::Sub(a, b) => sub(substitute(a, map), substitute(b, map)),
        ScalarExpr::Mul(a, b) => mul(substitute(a, map), substitute(b, map)),
        ScalarExpr::Div(a, b) => div(substitute(a, map), substitute(b, map)),
        ScalarExpr::Neg(a) => neg(substitute(a, map)),
        ScalarExpr::Pow(a, k) => pow(substitute(a, map), *k),
        ScalarExpr::Sin(a) => sin(substitute(a, map)),
        ScalarExpr::Cos(a) => cos(substitute(a, map)),
        ScalarExpr::Norm2 { dim } => {
            let mut acc = konst(0.0);
            for item in map.iter().take(*dim) {
                acc = add(acc, pow(item.clone(), 2));
            }
            acc
        }
        ScalarExpr::Plateau { arg, a, b, c, d } => Arc::new(ScalarExpr::Plateau {
            arg: substitute(arg, map),
            a: *a,
            b: *b,
            c: *c,
            d: *d,
        }),
        ScalarExpr::Glue { poly, arg } => glue(poly.clone(), substitute(arg, map)),
    }
}

/// Does the expression syntactically reference coordinate `i`?
pub fn uses_coord(e: &E, i: usize) -> bool {
    match &**e {
        ScalarExpr::Const(_) => false,
        ScalarExpr::Coord(j) => *j == i,
        ScalarExpr::Add(a, b)
        | ScalarExpr::Sub(a, b)
        | ScalarExpr::Mul(a, b)
        | ScalarExpr::Div(a, b) => uses_coord(a, i) || uses_coord(b, i),
        ScalarExpr::Neg(a) | ScalarExpr::Pow(a, _) | ScalarExpr::Sin(a) | ScalarExpr::Cos(a) => {
            uses_coord(a, i)
        }
        ScalarExpr::Norm2 { dim } => i < *dim,
        ScalarExpr::Plateau { arg, .. } | ScalarExpr::Glue { arg, .. } => uses_coord(arg, i),
    }
}

/// `Some(v)` when the expression is a literal constant.
pub fn as_const(e: &E) -> Option<f64> {
    match &**e {
        ScalarExpr::Const(v) => Some(*v),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_square_is_two_x() {
        let e = pow(coord(0), 2);
        let d = differentiate(&e, 0);
        assert_eq!(d, mul(konst(2.0), coord(0)));
        assert_eq!(differentiate(&e, 1), konst(0.0));
    }

    #[test]
    fn derivative_of_norm2() {
        let e = norm2(3);
        assert_eq!(differentiate(&e, 1), mul(konst(2.0), coord(1)));
        assert_eq!(differentiate(&e, 3), konst(0.0));
    }

    #[test]
    fn plateau_values() {
        let p = plateau(coord(0), 0.0, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(p.eval(&[-0.5]), 0.0);
        assert_eq!(p.eval(&[0.0]), 0.0);
        assert_eq!(p.eval(&[1.0]), 1.0);
        assert_eq!(p.eval(&[1.7]), 1.0);
        assert_eq!(p.eval(&[3.0]), 0.0);
        assert_eq!(p.eval(&[5.0]), 0.0);
        let mid = p.eval(&[0.5]);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn plateau_matches_expansion() {
        let arg = coord(0);
        let node = plateau(arg.clone(), 0.0, 1.0, 2.0, 3.0).unwrap();
        let expanded = expand_plateau(&arg, 0.0, 1.0, 2.0, 3.0);
        for t in [-1.0, 0.25, 0.5, 0.99, 1.5, 2.3, 2.9, 10.0] {
            assert_eq!(node.eval(&[t]), expanded.eval(&[t]));
        }
    }

    #[test]
    fn glue_limit_values() {
        assert_eq!(glue_eval(&[1.0], f64::INFINITY), 1.0);
        assert_eq!(glue_eval(&[1.0], -3.0), 0.0);
        assert_eq!(glue_eval(&[1.0], 0.0), 0.0);
        assert_eq!(glue_eval(&[0.0, 0.0, 1.0], f64::INFINITY), 0.0);
        assert!(glue_eval(&[1.0], f64::NAN).is_nan());
        // deep in the tail the product underflows cleanly
        assert_eq!(glue_eval(&[0.0, 0.0, 1.0], 1e-4), 0.0);
    }

    #[test]
    fn jet5_has_flat_window_near_zero() {
        let h = jet5(2);
        assert_eq!(h.eval(&[0.0, 0.0]), 0.0);
        let x = [0.3, 0.2];
        assert!((h.eval(&x) - 0.3f64.powi(5)).abs() < 1e-15);
        assert_eq!(h.eval(&[3.0, 0.0]), 0.0);
    }

    #[test]
    fn substitute_expands_norm2() {
        let e = norm2(2);
        let s = substitute(&e, &[coord(2), coord(3)]);
        assert_eq!(s.eval(&[0.0, 0.0, 3.0, 4.0]), 25.0);
    }
}
