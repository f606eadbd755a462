//! Gauge straightening on R^k x T^s: given Y = xi + W with W vertical and
//! left-invariant, build the bundle automorphism F (identity over the
//! x-factor) with F_* Y = xi + W~, where W~ agrees with W inside radius a
//! and vanishes outside radius b.
//!
//! With an abelian structure group the section flow reduces to a
//! quadrature: F^{-1}(x, th) = (x, th + sigma(x)) with
//!
//!   sigma(x) = int_a^{|x|} (W - W')(rho x/|x|) d rho / rho,
//!
//! where W' is W cut off between radius c = (a+b)/2 and b. The integrand
//! vanishes identically for rho <= c, so F is exactly the identity on the
//! closed a-ball, and W~ = W' exactly.

use super::Trajectory;
use crate::dsl::{norm2, plateau, Chart, VFieldExpr};
use crate::error::{Error, Result};
use crate::lie::rng_for_task;
use crate::linalg::RMat;
use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

/// Pointwise-evaluable straightening map F (and its inverse). Fixes the
/// x-coordinates exactly and translates the angles.
pub struct StraightenedMap {
    k: usize,
    s: usize,
    drift: VFieldExpr,
    cutoff_radius: f64,
    quad_tol: f64,
}

impl StraightenedMap {
    /// Angle drift sigma(x), computed by adaptive quadrature along the
    /// radial ray; exactly zero inside the cutoff radius.
    pub fn sigma(&self, x: &[f64]) -> Result<Vec<f64>> {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r <= self.cutoff_radius {
            return Ok(vec![0.0; self.s]);
        }
        let dir: Vec<f64> = x.iter().map(|c| c / r).collect();
        let mut out = Vec::with_capacity(self.s);
        for comp in 0..self.s {
            let f = |rho: f64| -> Result<f64> {
                let mut p = vec![0.0; self.k + self.s];
                for (i, d) in dir.iter().enumerate() {
                    p[i] = d * rho;
                }
                let v = self.drift.component(self.k + comp).eval(&p);
                if !v.is_finite() {
                    return Err(Error::Quadrature(format!(
                        "drift not finite at rho = {rho}"
                    )));
                }
                Ok(v / rho)
            };
            out.push(adaptive_simpson(
                &f,
                self.cutoff_radius,
                r,
                self.quad_tol,
            )?);
        }
        Ok(out)
    }

    /// F(x, th) = (x, th - sigma(x)).
    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.k + self.s {
            return Err(Error::DimensionMismatch {
                expected: self.k + self.s,
                got: p.len(),
            });
        }
        let sigma = self.sigma(&p[..self.k])?;
        let mut out = p.to_vec();
        for (i, s) in sigma.iter().enumerate() {
            out[self.k + i] -= s;
        }
        Ok(out)
    }

    /// F^{-1}(x, th) = (x, th + sigma(x)).
    pub fn eval_inverse(&self, p: &[f64]) -> Result<Vec<f64>> {
        let sigma = self.sigma(&p[..self.k])?;
        let mut out = p.to_vec();
        for (i, s) in sigma.iter().enumerate() {
            out[self.k + i] += s;
        }
        Ok(out)
    }

    /// Central-difference Jacobian of F.
    pub fn fd_jacobian(&self, p: &[f64], h: f64) -> Result<RMat> {
        let n = self.k + self.s;
        let mut jac = RMat::zeros(n, n);
        for j in 0..n {
            let mut pp = p.to_vec();
            let mut pm = p.to_vec();
            pp[j] += h;
            pm[j] -= h;
            let fp = self.eval(&pp)?;
            let fm = self.eval(&pm)?;
            for i in 0..n {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        Ok(jac)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StraightenReport {
    /// Max pushforward residual of xi + W against xi + W~ over the sample
    /// set, with a finite-difference Jacobian of F.
    pub residual_max: f64,
    pub residual_points: usize,
    /// F evaluated exactly to the identity on sampled points of the
    /// closed a-ball.
    pub identity_exact: bool,
    /// Max |W~| over sampled points with |x| >= b.
    pub tail_max: f64,
}

/// Builds the straightening for Y = xi + W, a < b, with the residual
/// report evaluated on 200 deterministic sample points.
pub fn straighten_lemma37(
    w: &VFieldExpr,
    a: f64,
    b: f64,
) -> Result<(StraightenedMap, VFieldExpr, StraightenReport)> {
    if !(0.0 < a && a < b) {
        return Err(Error::InvalidInput("need 0 < a < b".into()));
    }
    let (k, s) = match w.chart() {
        Chart::ProductRT { k, s } => (*k, *s),
        other => {
            return Err(Error::ChartMismatch(
                other.to_string(),
                "R^k x T^s".into(),
            ))
        }
    };
    for i in 0..k {
        if crate::dsl::expr::as_const(w.component(i)) != Some(0.0) {
            return Err(Error::InvalidInput(
                "W must be vertical (zero horizontal components)".into(),
            ));
        }
    }
    for i in k..(k + s) {
        for j in k..(k + s) {
            if crate::dsl::expr::uses_coord(w.component(i), j) {
                return Err(Error::InvalidInput(
                    "W must be left-invariant (angle components independent of the angles)".into(),
                ));
            }
        }
    }

    let c = 0.5 * (a + b);
    // cutoff in t = |x|^2: identically 1 through c^2, 0 from b^2 on
    let cut = plateau(norm2(k), -2.0, -1.0, c * c, b * b)?;
    let w_tilde = w.scale_by(&cut);
    let one_minus_cut = crate::dsl::sub(crate::dsl::konst(1.0), cut);
    let drift = w.scale_by(&one_minus_cut);

    let map = StraightenedMap {
        k,
        s,
        drift,
        cutoff_radius: c,
        quad_tol: 1e-11,
    };

    let report = straighten_report(&map, w, &w_tilde, a, b)?;
    Ok((map, w_tilde, report))
}

fn straighten_report(
    map: &StraightenedMap,
    w: &VFieldExpr,
    w_tilde: &VFieldExpr,
    a: f64,
    b: f64,
) -> Result<StraightenReport> {
    let k = map.k;
    let s = map.s;
    let chart = Chart::product_rt(k, s);
    let xi_comps = crate::dsl::radial_components(&chart);
    let y_field = VFieldExpr::new(chart, xi_comps.clone())?.add(w)?;
    let target = VFieldExpr::new(chart, xi_comps)?.add(w_tilde)?;

    let mut rng = rng_for_task(2024, 0);
    let mut residual_max = 0.0f64;
    let mut identity_exact = true;
    let mut tail_max = 0.0f64;
    let mut count = 0usize;
    let fd_h = 1e-6;
    for _ in 0..200 {
        // radii spread from inside a to beyond b
        let r: f64 = rng.gen_range(0.0..(b + 1.5));
        let mut x = vec![0.0; k];
        let mut norm = 0.0;
        for xi in x.iter_mut() {
            *xi = rng.gen_range(-1.0..1.0);
            norm += *xi * *xi;
        }
        let norm = norm.sqrt().max(1e-9);
        for xi in x.iter_mut() {
            *xi *= r / norm;
        }
        let mut p = x.clone();
        for _ in 0..s {
            p.push(rng.gen_range(0.0..std::f64::consts::TAU));
        }

        if r <= a {
            let fp = map.eval(&p)?;
            if fp != p {
                identity_exact = false;
            }
        }
        if r >= b {
            let wt = w_tilde.evaluate(&p)?;
            tail_max = tail_max.max(DVector::from_vec(wt).norm());
        }

        let jac = map.fd_jacobian(&p, fd_h)?;
        let yp = DVector::from_vec(y_field.evaluate(&p)?);
        let fp = map.eval(&p)?;
        let t_fp = DVector::from_vec(target.evaluate(&fp)?);
        let res = (jac * yp - t_fp).norm();
        residual_max = residual_max.max(res);
        count += 1;
    }
    Ok(StraightenReport {
        residual_max,
        residual_points: count,
        identity_exact,
        tail_max,
    })
}

fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(lo)?;
    let fb = f(hi)?;
    let m = 0.5 * (lo + hi);
    let fm = f(m)?;
    let whole = simpson(lo, hi, fa, fm, fb);
    let v = simpson_rec(f, lo, hi, fa, fm, fb, whole, tol, 0)?;
    Ok(sign * v)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if depth > 40 {
        return Err(Error::Quadrature(format!(
            "adaptive refinement exceeded depth 40 on [{a}, {b}]"
        )));
    }
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol * (1.0 + (left + right).abs()) {
        return Ok(left + right + delta / 15.0);
    }
    let lv = simpson_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth + 1)?;
    let rv = simpson_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth + 1)?;
    Ok(lv + rv)
}

/// Exercises the trajectory type from this module's integrator on one of
/// the closed-form flows; used by the CSV exporter tests.
pub fn sample_trajectory(
    field: &VFieldExpr,
    p0: &[f64],
    t: f64,
    tol: f64,
) -> Result<Trajectory> {
    super::integrate_trajectory(field, p0, t, tol, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{konst, parse_field};

    fn example_w() -> VFieldExpr {
        let chart = Chart::product_rt(1, 1);
        parse_field("[0, plateau(norm2(x); 0.25, 1, 4, 9)]", &chart).unwrap()
    }

    #[test]
    fn straighten_contract_on_t1() {
        let w = example_w();
        let (map, w_tilde, report) = straighten_lemma37(&w, 1.0, 2.0).unwrap();
        assert!(report.identity_exact, "F = id on the a-ball, exactly");
        assert!(
            report.residual_max < 1e-6,
            "pushforward residual {} too large",
            report.residual_max
        );
        assert!(report.tail_max < 1e-9, "W~ must vanish beyond b");

        // bundle map: x fixed exactly, angles translated
        let p = [1.7, 0.4];
        let fp = map.eval(&p).unwrap();
        assert_eq!(fp[0], p[0]);
        assert_ne!(fp[1], p[1]);
        let back = map.eval_inverse(&fp).unwrap();
        assert!((back[1] - p[1]).abs() < 1e-12);

        // W~ = W inside the a-ball
        let q = [0.9, 0.0];
        assert_eq!(
            w_tilde.evaluate(&q).unwrap(),
            w.evaluate(&q).unwrap()
        );
    }

    #[test]
    fn zero_drift_gives_identity() {
        let chart = Chart::product_rt(1, 1);
        let w = VFieldExpr::new(chart, vec![konst(0.0), konst(0.0)]).unwrap();
        let (map, _, report) = straighten_lemma37(&w, 1.0, 2.0).unwrap();
        for p in [[0.3, 0.1], [1.5, 2.0], [3.0, 4.0]] {
            assert_eq!(map.eval(&p).unwrap(), p.to_vec());
        }
        assert!(report.identity_exact);
        assert_eq!(report.residual_max, 0.0);
    }

    #[test]
    fn w_vanishing_inside_b_straightens_to_radial() {
        // W supported outside the b-ball: W' = 0 and F_* Y = xi
        let chart = Chart::product_rt(1, 1);
        let w = parse_field("[0, plateau(norm2(x); 9, 16, 100, 121)]", &chart).unwrap();
        let (_, w_tilde, report) = straighten_lemma37(&w, 1.0, 2.0).unwrap();
        for p in [[0.5, 0.0], [2.5, 1.0], [5.0, 2.0]] {
            let wt = w_tilde.evaluate(&p).unwrap();
            assert!(wt.iter().all(|&c| c == 0.0), "W~ = 0 identically");
        }
        assert!(report.residual_max < 1e-6);
    }

    #[test]
    fn rejects_bad_inputs() {
        let w = example_w();
        assert!(straighten_lemma37(&w, 2.0, 1.0).is_err());
        let chart = Chart::product_rt(1, 1);
        let horizontal = parse_field("[x1, 0]", &chart).unwrap();
        assert!(straighten_lemma37(&horizontal, 1.0, 2.0).is_err());
    }
}
