//! Flow integration and the product-chart constructions built on it.

mod closure;
mod nullspace31;
mod straighten;

pub use closure::{trajectory_closure_class, ClosureClass, ClosureReport};
pub use nullspace31::{lemma31_nullspace, Lemma31Result};
pub use straighten::{straighten_lemma37, StraightenReport, StraightenedMap};

use crate::dsl::VFieldExpr;
use crate::error::{Error, Result};

/// One integrated trajectory with its accepted-step statistics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub steps: usize,
    /// Largest local error estimate among accepted steps; stays below the
    /// requested tolerance by construction.
    pub max_local_error: f64,
}

impl Trajectory {
    pub fn final_point(&self) -> &[f64] {
        self.points.last().expect("trajectory has points")
    }

    /// Rows (t, x1, ..) with torus angles reduced mod 2*pi.
    pub fn csv_rows(&self, chart: &crate::dsl::Chart) -> Vec<Vec<f64>> {
        let k = chart.x_dim();
        self.times
            .iter()
            .zip(&self.points)
            .map(|(t, p)| {
                let mut row = vec![*t];
                for (i, &c) in p.iter().enumerate() {
                    row.push(if i < k {
                        c
                    } else {
                        c.rem_euclid(std::f64::consts::TAU)
                    });
                }
                row
            })
            .collect()
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 1_000_000;

fn deriv(field: &VFieldExpr, p: &[f64]) -> Result<Vec<f64>> {
    field.evaluate(p)
}

/// Adaptive Dormand-Prince integration of the field's flow from `p0` for
/// time `t` (either sign). The step is capped at 0.1 while the Euclidean
/// part sits inside the unit ball, to resolve approaches to the origin.
pub fn integrate_flow(field: &VFieldExpr, p0: &[f64], t: f64, tol: f64) -> Result<Vec<f64>> {
    Ok(integrate_trajectory(field, p0, t, tol, false)?
        .final_point()
        .to_vec())
}

pub fn integrate_trajectory(
    field: &VFieldExpr,
    p0: &[f64],
    t: f64,
    tol: f64,
    keep_samples: bool,
) -> Result<Trajectory> {
    if tol <= 0.0 {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let n = p0.len();
    let k = field.chart().x_dim();
    let dir = if t >= 0.0 { 1.0 } else { -1.0 };
    let t_end = t.abs();
    let mut time = 0.0f64;
    let mut y = p0.to_vec();
    let mut traj = Trajectory {
        times: vec![0.0],
        points: vec![y.clone()],
        steps: 0,
        max_local_error: 0.0,
    };
    if t == 0.0 {
        return Ok(traj);
    }
    let mut h = (t_end / 100.0).min(0.05).max(1e-8);
    let mut k_stages: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];

    while time < t_end {
        if traj.steps >= MAX_STEPS {
            return Err(Error::InvalidInput(format!(
                "integration exceeded {MAX_STEPS} steps"
            )));
        }
        // max-step rule near the origin of the Euclidean factor
        let xnorm: f64 = y[..k].iter().map(|c| c * c).sum::<f64>().sqrt();
        let h_cap = if xnorm <= 1.0 { 0.1 } else { 1.0 };
        h = h.min(h_cap).min(t_end - time);

        k_stages[0] = deriv(field, &y)?.iter().map(|v| v * dir).collect();
        for stage in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k_stages.iter().enumerate().take(stage) {
                let a = A[stage - 1][j];
                if a != 0.0 {
                    for i in 0..n {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k_stages[stage] = deriv(field, &ys)?.iter().map(|v| v * dir).collect();
        }
        let mut y5 = y.clone();
        let mut err = 0.0f64;
        for i in 0..n {
            let mut acc5 = 0.0;
            let mut acc4 = 0.0;
            for j in 0..7 {
                acc5 += B5[j] * k_stages[j][i];
                acc4 += B4[j] * k_stages[j][i];
            }
            y5[i] += h * acc5;
            let scale = tol * (1.0 + y[i].abs().max(y5[i].abs()));
            err = err.max((h * (acc5 - acc4)).abs() / scale);
        }
        if err <= 1.0 {
            time += h;
            y = y5;
            traj.steps += 1;
            traj.max_local_error = traj.max_local_error.max(err * tol);
            if keep_samples {
                traj.times.push(dir * time);
                traj.points.push(y.clone());
            }
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 * t_end.max(1.0) {
            return Err(Error::StepUnderflow { t: dir * time, h });
        }
    }
    if !keep_samples {
        traj.times.push(dir * time);
        traj.points.push(y.clone());
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{complex_structure_field, product_field, radial};

    #[test]
    fn radial_flow_doubles_in_log2() {
        let xi = radial(2);
        let p = integrate_flow(&xi, &[1.0, 0.0], 2.0f64.ln(), 1e-10).unwrap();
        assert!((p[0] - 2.0).abs() < 1e-9);
        assert!(p[1].abs() < 1e-12);
    }

    #[test]
    fn rotation_flow_quarter_turn() {
        let y = complex_structure_field(1);
        let p = integrate_flow(&y, &[1.0, 0.0], std::f64::consts::FRAC_PI_2, 1e-10).unwrap();
        assert!((p[0]).abs() < 1e-9);
        assert!((p[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn product_flow_closed_form() {
        let x = product_field(1, 1, &[1.0]).unwrap();
        let p = integrate_flow(&x, &[1.0, 0.0], 1.0, 1e-10).unwrap();
        assert!((p[0] - std::f64::consts::E).abs() < 1e-8);
        assert!((p[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn backward_flow_inverts() {
        let xi = radial(2);
        let fwd = integrate_flow(&xi, &[0.3, -0.8], 1.3, 1e-11).unwrap();
        let back = integrate_flow(&xi, &fwd, -1.3, 1e-11).unwrap();
        assert!((back[0] - 0.3).abs() < 1e-9);
        assert!((back[1] + 0.8).abs() < 1e-9);
    }

    #[test]
    fn halving_tolerance_improves_error() {
        // integrator order: halving tol reduces closed-form error by >= 4x
        let fields: Vec<(VFieldExpr, Vec<f64>, f64, Box<dyn Fn(&[f64]) -> f64>)> = vec![
            (
                radial(2),
                vec![1.0, 0.5],
                2.0f64.ln(),
                Box::new(|p: &[f64]| {
                    let e = [(2.0f64), 1.0];
                    ((p[0] - e[0]).powi(2) + (p[1] - e[1]).powi(2)).sqrt()
                }),
            ),
            (
                complex_structure_field(1),
                vec![1.0, 0.0],
                std::f64::consts::PI,
                Box::new(|p: &[f64]| ((p[0] + 1.0).powi(2) + p[1].powi(2)).sqrt()),
            ),
        ];
        for (field, p0, t, err_of) in fields {
            let mut errs = Vec::new();
            for tol in [1e-4, 5e-5, 2.5e-5] {
                let p = integrate_flow(&field, &p0, t, tol).unwrap();
                errs.push(err_of(&p).max(1e-16));
            }
            assert!(
                errs[0] / errs[2] >= 4.0 || errs[2] < 1e-12,
                "quartering tol should cut error by >= 4x: {errs:?}"
            );
        }
    }

    #[test]
    fn error_contract_on_closed_forms() {
        for tol in [1e-6, 1e-9] {
            let y = complex_structure_field(1);
            let p = integrate_flow(&y, &[1.0, 0.0], std::f64::consts::PI, tol).unwrap();
            let err = ((p[0] + 1.0).powi(2) + p[1].powi(2)).sqrt();
            assert!(err < 10.0 * tol, "tol {tol}: err {err}");
        }
    }
}
