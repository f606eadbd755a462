//! Periodicity and linearity analysis.
//!
//! Torus coordinates may only influence an expression through sin/cos
//! whose arguments are integer combinations of angles plus a theta-free
//! part; that syntactic restriction makes 2*pi periodicity exact. Map
//! components on product charts may additionally carry an integer-linear
//! bare-angle part (the winding matrix of a torus self-map).

use super::chart::Chart;
use super::expr::{as_const, ScalarExpr, E};
use crate::error::{Error, Result};

/// How an expression depends on the torus angles.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaForm {
    /// Coefficients of the bare (un-wrapped) linear angle part.
    pub linear: Vec<f64>,
    /// Whether any periodic (sin/cos-wrapped) dependence occurs.
    pub periodic: bool,
}

impl ThetaForm {
    fn free(s: usize) -> ThetaForm {
        ThetaForm {
            linear: vec![0.0; s],
            periodic: false,
        }
    }

    pub fn is_theta_free(&self) -> bool {
        !self.periodic && self.linear.iter().all(|&c| c == 0.0)
    }

    pub fn is_periodic(&self) -> bool {
        self.linear.iter().all(|&c| c == 0.0)
    }

    fn combine_linear(mut self, other: &ThetaForm, sign: f64) -> ThetaForm {
        for (a, b) in self.linear.iter_mut().zip(other.linear.iter()) {
            *a += sign * b;
        }
        self.periodic |= other.periodic;
        self
    }
}

/// Classifies the angle dependence, or errors on forms that cannot be
/// periodic (angles outside sin/cos, products of angles, non-integer
/// frequencies).
pub fn theta_form(e: &E, chart: &Chart) -> Result<ThetaForm> {
    let s = chart.theta_dim();
    let k = chart.x_dim();
    if s == 0 {
        return Ok(ThetaForm::free(0));
    }
    let bad = |msg: &str| -> Result<ThetaForm> { Err(Error::InvalidInput(msg.to_string())) };
    match &**e {
        ScalarExpr::Const(_) | ScalarExpr::Norm2 { .. } => Ok(ThetaForm::free(s)),
        ScalarExpr::Coord(i) => {
            let mut f = ThetaForm::free(s);
            if *i >= k {
                f.linear[*i - k] = 1.0;
            }
            Ok(f)
        }
        ScalarExpr::Add(a, b) => {
            let fa = theta_form(a, chart)?;
            let fb = theta_form(b, chart)?;
            Ok(fa.combine_linear(&fb, 1.0))
        }
        ScalarExpr::Sub(a, b) => {
            let fa = theta_form(a, chart)?;
            let fb = theta_form(b, chart)?;
            Ok(fa.combine_linear(&fb, -1.0))
        }
        ScalarExpr::Neg(a) => {
            let fa = theta_form(a, chart)?;
            Ok(ThetaForm::free(s).combine_linear(&fa, -1.0))
        }
        ScalarExpr::Mul(a, b) => {
            let fa = theta_form(a, chart)?;
            let fb = theta_form(b, chart)?;
            match (fa.is_periodic(), fb.is_periodic()) {
                (true, true) => Ok(ThetaForm {
                    linear: vec![0.0; s],
                    periodic: fa.periodic || fb.periodic,
                }),
                (false, true) => scale_linear(&fa, b),
                (true, false) => scale_linear(&fb, a),
                (false, false) => bad("product of bare angle terms is not periodic"),
            }
        }
        ScalarExpr::Div(a, b) => {
            let fa = theta_form(a, chart)?;
            let fb = theta_form(b, chart)?;
            if fa.is_periodic() && fb.is_periodic() {
                Ok(ThetaForm {
                    linear: vec![0.0; s],
                    periodic: fa.periodic || fb.periodic,
                })
            } else {
                bad("bare angle terms cannot appear in quotients")
            }
        }
        ScalarExpr::Pow(a, kk) => {
            let fa = theta_form(a, chart)?;
            if fa.is_periodic() || *kk == 1 {
                Ok(ThetaForm {
                    linear: fa.linear.clone(),
                    periodic: fa.periodic,
                })
            } else {
                bad("powers of bare angle terms are not periodic")
            }
        }
        ScalarExpr::Sin(a) | ScalarExpr::Cos(a) => {
            let fa = theta_form(a, chart)?;
            for c in &fa.linear {
                if (c - c.round()).abs() > 1e-9 {
                    return bad("sin/cos angle frequencies must be integers");
                }
            }
            Ok(ThetaForm {
                linear: vec![0.0; s],
                periodic: true,
            })
        }
        ScalarExpr::Plateau { arg, .. } | ScalarExpr::Glue { arg, .. } => {
            let fa = theta_form(arg, chart)?;
            if fa.is_periodic() {
                Ok(ThetaForm {
                    linear: vec![0.0; s],
                    periodic: fa.periodic,
                })
            } else {
                bad("bare angle terms cannot appear inside plateau/glue")
            }
        }
    }
}

fn scale_linear(f: &ThetaForm, factor: &E) -> Result<ThetaForm> {
    if f.linear.iter().all(|&c| c == 0.0) {
        return Ok(f.clone());
    }
    match as_const(factor) {
        Some(c) if (c - c.round()).abs() < 1e-9 => Ok(ThetaForm {
            linear: f.linear.iter().map(|x| x * c).collect(),
            periodic: f.periodic,
        }),
        _ => Err(Error::InvalidInput(
            "bare angles may only be scaled by integer constants".into(),
        )),
    }
}

/// Vector-field component check: fully periodic in every angle.
pub fn check_field_component(e: &E, chart: &Chart) -> Result<()> {
    let f = theta_form(e, chart)?;
    if !f.is_periodic() {
        return Err(Error::InvalidInput(
            "field components must be periodic in the angles (bare theta found)".into(),
        ));
    }
    Ok(())
}

/// Map theta-component check: integer winding plus periodic rest; returns
/// the winding coefficients.
pub fn check_map_theta_component(e: &E, chart: &Chart) -> Result<Vec<i64>> {
    let f = theta_form(e, chart)?;
    let mut winding = Vec::with_capacity(f.linear.len());
    for c in &f.linear {
        if (c - c.round()).abs() > 1e-9 {
            return Err(Error::InvalidInput(
                "map angle components need integer winding coefficients".into(),
            ));
        }
        winding.push(c.round() as i64);
    }
    Ok(winding)
}

/// Structural linearity detection: every partial is a literal constant and
/// the value at the origin is zero. Returns the matrix when linear.
pub fn detect_linear(components: &[E], chart: &Chart) -> Option<nalgebra::DMatrix<f64>> {
    if chart.theta_dim() != 0 {
        return None;
    }
    let n = chart.dim();
    if components.len() != n {
        return None;
    }
    let mut a = nalgebra::DMatrix::zeros(n, n);
    let zero = vec![0.0; n];
    for (i, comp) in components.iter().enumerate() {
        if comp.eval(&zero) != 0.0 {
            return None;
        }
        for j in 0..n {
            let d = super::expr::differentiate(comp, j);
            match as_const(&d) {
                Some(v) => a[(i, j)] = v,
                None => return None,
            }
        }
    }
    Some(a)
}
