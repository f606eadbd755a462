//! Named constructors for the explicit vector fields, field pairs and
//! twist maps used throughout: the radial field, the complex and
//! quaternionic structure fields, the U(n) and Sp(r) invariant pairs, the
//! Hopf fiber twist, and the product-chart fields.

use crate::dsl::{
    self, add, coord, cos, div, konst, mul, neg, norm2, plateau, pow, sin, smooth_step, sub,
    substitute, Chart, MapExpr, ScalarExpr, VFieldExpr, E,
};
use crate::error::{Error, Result};
use crate::lie::{quaternion_structures, GroupSpec, Spec};

/// A couple of fields whose joint automorphism group is intended to be
/// exactly `group` acting on `chart`.
#[derive(Debug, Clone)]
pub struct FieldPair {
    pub x: VFieldExpr,
    pub x1: VFieldExpr,
    pub group: Spec,
    pub chart: Chart,
}

/// The radial field of R^m.
pub fn radial(m: usize) -> VFieldExpr {
    let chart = Chart::euclidean(m);
    VFieldExpr::new(chart, dsl::radial_components(&chart)).expect("radial components")
}

/// The rotation field Y(x) = J x on R^{2n}, tangent to every sphere.
pub fn complex_structure_field(n: usize) -> VFieldExpr {
    let chart = Chart::euclidean(2 * n);
    let mut comps = Vec::with_capacity(2 * n);
    for j in 0..n {
        comps.push(neg(coord(2 * j + 1)));
        comps.push(coord(2 * j));
    }
    VFieldExpr::new(chart, comps).expect("J field components")
}

/// The three quaternionic structure fields Y, Z, U on R^{4r} (values
/// J x, K x, L x).
pub fn quaternionic_fields(r: usize) -> (VFieldExpr, VFieldExpr, VFieldExpr) {
    let chart = Chart::euclidean(4 * r);
    let st = quaternion_structures(r);
    let mk = |m: &crate::linalg::RMat| {
        VFieldExpr::new(chart, dsl::linear_field_components(m)).expect("structure field")
    };
    (mk(&st[0]), mk(&st[1]), mk(&st[2]))
}

/// X = radial, X1 = (|x|^2 - 1) Y on R^{2n}: the pair whose automorphism
/// group is U(n). X1 vanishes exactly on {0} and the unit sphere.
pub fn un_pair(n: usize) -> Result<FieldPair> {
    let chart = Chart::euclidean(2 * n);
    let x = radial(2 * n);
    let y = complex_structure_field(n);
    let x1 = y.scale_by(&sub(norm2(2 * n), konst(1.0)));
    Ok(FieldPair {
        x,
        x1,
        group: GroupSpec::unitary(n)?,
        chart,
    })
}

/// Three bump profiles in the single variable t = |x|^2, each vanishing
/// at t = 1, with phi_a = delta_ab on the b-th interval and jointly
/// positive away from t = 1.
#[derive(Debug, Clone)]
pub struct BumpTriple {
    pub phi: [E; 3],
    pub intervals: [(f64, f64); 3],
}

impl BumpTriple {
    /// The profiles for the intervals I1 = (4,9), I2 = (16,25),
    /// I3 = (36,49), with transition width 0.5:
    /// phi1 rises after 1 and lives until 9.5, phi2 covers both t < 1 and
    /// [9.5, 25.5), phi3 is a step that stays 1 beyond 25.5.
    pub fn default_paper() -> BumpTriple {
        let t = coord(0);
        let phi1 = plateau(t.clone(), 1.0, 1.5, 9.0, 9.5).expect("phi1 params");
        let low = smooth_step(div(sub(konst(1.0), t.clone()), konst(0.5)));
        let phi2 = add(
            plateau(t.clone(), 9.0, 9.5, 25.0, 25.5).expect("phi2 params"),
            low,
        );
        let phi3 = smooth_step(div(sub(t, konst(25.0)), konst(0.5)));
        BumpTriple {
            phi: [phi1, phi2, phi3],
            intervals: [(4.0, 9.0), (16.0, 25.0), (36.0, 49.0)],
        }
    }

    /// Sampled validation of the defining conditions.
    pub fn validate(&self) -> Result<()> {
        for phi in &self.phi {
            let v = phi.eval(&[1.0]);
            if v.abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "bump profile does not vanish at t = 1 (value {v:.3e})"
                )));
            }
        }
        for (b, (lo, hi)) in self.intervals.iter().enumerate() {
            for j in 0..=100 {
                let t = lo + (hi - lo) * j as f64 / 100.0;
                for (a, phi) in self.phi.iter().enumerate() {
                    let expected = if a == b { 1.0 } else { 0.0 };
                    let v = phi.eval(&[t]);
                    if (v - expected).abs() > 1e-12 {
                        return Err(Error::InvalidInput(format!(
                            "phi{}({t}) = {v}, expected {expected}",
                            a + 1
                        )));
                    }
                }
            }
        }
        for j in 0..=2000 {
            let t = 100.0 * j as f64 / 2000.0;
            if (t - 1.0).abs() <= 1e-3 {
                continue;
            }
            let s: f64 = self.phi.iter().map(|p| p.eval(&[t]).powi(2)).sum();
            if s <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "bump triple vanishes jointly at t = {t}"
                )));
            }
        }
        Ok(())
    }
}

/// X = radial, X1 = phi1(|x|^2) Y + phi2(|x|^2) Z + phi3(|x|^2) U on
/// R^{4r}: the pair whose automorphism group is Sp(r). On the first
/// interval X1 = Y exactly, on the second Z, on the third U.
pub fn sp_pair(r: usize, bumps: &BumpTriple) -> Result<FieldPair> {
    bumps.validate()?;
    let chart = Chart::euclidean(4 * r);
    let x = radial(4 * r);
    let (y, z, u) = quaternionic_fields(r);
    let t = norm2(4 * r);
    let compose = |phi: &E| substitute(phi, &[t.clone()]);
    let x1 = y
        .scale_by(&compose(&bumps.phi[0]))
        .add(&z.scale_by(&compose(&bumps.phi[1])))?
        .add(&u.scale_by(&compose(&bumps.phi[2])))?;
    Ok(FieldPair {
        x,
        x1,
        group: GroupSpec::sp(r)?,
        chart,
    })
}

/// Default twist profile on the stereographic chart of S^2: a plateau of
/// the chart radius, equal to 1 on |u| <= 1 and 0 outside |u| <= 2.
pub fn default_hopf_profile() -> E {
    plateau(norm2(2), -2.0, -1.0, 1.0, 4.0).expect("profile params")
}

/// The Hopf fiber twist on R^4 minus the origin:
///
///   lambda(x) = e^{i mu(pi_H(x / |x|))} . x
///
/// in the complex structure J, where pi_H is the Hopf projection S^3 ->
/// S^2 followed by the stereographic chart whose origin is the fiber
/// z1 = 0. lambda is homogeneous of degree 1, commutes with the scalar
/// U(1) flow, and preserves every field p(|x|^2) xi + q(|x|^2) Y while
/// failing to be linear.
///
/// The chart coordinates pull back to the rational functions
/// u1 = Re(z1 conj(z2)) / |z2|^2, u2 = Im(z1 conj(z2)) / |z2|^2; the
/// antipodal fiber z2 = 0 lies outside the chart, where the twist angle
/// is identically 0 but the raw coordinate expressions are 0/0. For the
/// default radial profile the angle is built from the simplified ratio
/// |z1|^2 / |z2|^2 instead, which evaluates cleanly (to 0) on that fiber.
pub fn hopf_twist(mu: &E) -> Result<MapExpr> {
    // z1 = x1 + i x2, z2 = x3 + i x4
    let q1 = add(mul(coord(0), coord(2)), mul(coord(1), coord(3)));
    let q2 = sub(mul(coord(1), coord(2)), mul(coord(0), coord(3)));
    let p = add(pow(coord(2), 2), pow(coord(3), 2));
    let u1 = div(q1, p.clone());
    let u2 = div(q2, p);
    let angle = substitute(mu, &[u1, u2]);
    hopf_twist_with_angle(mu, angle)
}

/// Hopf twist with the default profile, using the simplified twist angle
/// plateau(|z1|^2 / |z2|^2) so the map evaluates everywhere off 0.
pub fn hopf_twist_default() -> MapExpr {
    let mu = default_hopf_profile();
    let ratio = div(
        add(pow(coord(0), 2), pow(coord(1), 2)),
        add(pow(coord(2), 2), pow(coord(3), 2)),
    );
    let angle = plateau(ratio, -2.0, -1.0, 1.0, 4.0).expect("profile params");
    hopf_twist_with_angle(&mu, angle).expect("default profile is admissible")
}

fn hopf_twist_with_angle(mu: &E, angle: E) -> Result<MapExpr> {
    let origin = mu.eval(&[0.0, 0.0]);
    if origin == 0.0 || !origin.is_finite() {
        return Err(Error::InvalidInput(
            "twist profile must be nonzero at the chart origin".into(),
        ));
    }
    // compact support in the chart, sampled on rings of growing radius
    for radius in [10.0, 30.0, 100.0, 1000.0] {
        for j in 0..16 {
            let ang = std::f64::consts::TAU * j as f64 / 16.0;
            let v = mu.eval(&[radius * ang.cos(), radius * ang.sin()]);
            if v != 0.0 {
                return Err(Error::InvalidInput(format!(
                    "twist profile is not compactly supported (mu = {v:.3e} at radius {radius})"
                )));
            }
        }
    }
    let chart = Chart::euclidean_punctured(4);
    let c = cos(angle.clone());
    let s = sin(angle);
    // J x = (-x2, x1, -x4, x3)
    let jx = [neg(coord(1)), coord(0), neg(coord(3)), coord(2)];
    let comps = (0..4)
        .map(|i| add(mul(c.clone(), coord(i)), mul(s.clone(), jx[i].clone())))
        .collect();
    MapExpr::new(chart, comps)
}

/// X = xi + V on R^k x T^s with a constant vertical vector V.
pub fn product_field(k: usize, s: usize, v: &[f64]) -> Result<VFieldExpr> {
    if v.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            got: v.len(),
        });
    }
    let chart = Chart::product_rt(k, s);
    let mut comps: Vec<E> = (0..k).map(coord).collect();
    comps.extend(v.iter().map(|&c| konst(c)));
    VFieldExpr::new(chart, comps)
}

/// Validates the jet conditions j^4_0 h = 0, j^5_0 h != 0 by scaled
/// difference quotients along probe directions: h(t u)/t^4 must tend to 0
/// and h(t u)/t^5 must stabilize at a nonzero value for some direction.
pub fn validate_jet5(h: &E, k: usize) -> Result<()> {
    let mut directions: Vec<Vec<f64>> = (0..k)
        .map(|j| {
            let mut u = vec![0.0; k];
            u[j] = 1.0;
            u
        })
        .collect();
    directions.push((0..k).map(|j| 1.0 / (1.0 + j as f64)).collect());

    let mut some_fifth_nonzero = false;
    for u in &directions {
        let ratio = |t: f64, power: i32| {
            let p: Vec<f64> = u.iter().map(|c| c * t).collect();
            h.eval(&p) / t.powi(power)
        };
        let ts: Vec<f64> = (6..=16).map(|j| 0.5f64.powi(j)).collect();
        let r4_tail: Vec<f64> = ts.iter().rev().take(3).map(|&t| ratio(t, 4).abs()).collect();
        if r4_tail.iter().any(|&r| !r.is_finite() || r > 1e-4) {
            return Err(Error::JetValidation(format!(
                "4-jet does not vanish along {u:?} (|h(tu)|/t^4 tail {r4_tail:?})"
            )));
        }
        let r5a = ratio(ts[ts.len() - 1], 5);
        let r5b = ratio(ts[ts.len() - 3], 5);
        if r5a.is_finite() && r5a.abs() > 1e-9 && (r5a / r5b - 1.0).abs() < 0.1 {
            some_fifth_nonzero = true;
        }
    }
    if !some_fifth_nonzero {
        return Err(Error::JetValidation(
            "5-jet vanishes along every probe direction".into(),
        ));
    }
    Ok(())
}

/// X1 = V1 + (h . pi_1) X on R^k x T^s, where V1 is vertical with
/// x-dependent angle components and h satisfies the jet conditions.
pub fn product_field_x1(
    k: usize,
    s: usize,
    v1: &VFieldExpr,
    h: &E,
    x_field: &VFieldExpr,
) -> Result<VFieldExpr> {
    let chart = Chart::product_rt(k, s);
    if !v1.chart().compatible(&chart) || !x_field.chart().compatible(&chart) {
        return Err(Error::ChartMismatch(
            v1.chart().to_string(),
            chart.to_string(),
        ));
    }
    for i in 0..k {
        if *v1.component(i) != *konst(0.0) {
            return Err(Error::InvalidInput(
                "V1 must be vertical (zero horizontal components)".into(),
            ));
        }
    }
    validate_jet5(h, k)?;
    let h_scaled = x_field.scale_by(h);
    v1.add(&h_scaled)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_values() {
        let xi = radial(3);
        assert_eq!(xi.evaluate(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn rotation_field_values_and_tangency() {
        let y = complex_structure_field(1);
        assert_eq!(y.evaluate(&[1.0, 0.0]).unwrap(), vec![0.0, 1.0]);
        let y2 = complex_structure_field(2);
        for p in [[1.0, 2.0, -0.5, 0.25], [0.1, 0.0, 3.0, 4.0]] {
            let v = y2.evaluate(&p).unwrap();
            let dot: f64 = v.iter().zip(&p).map(|(a, b)| a * b).sum();
            assert!(dot.abs() < 1e-15, "Y is tangent to spheres");
        }
    }

    #[test]
    fn quaternionic_fields_at_e1() {
        let (y, z, u) = quaternionic_fields(1);
        let e1 = [1.0, 0.0, 0.0, 0.0];
        assert_eq!(y.evaluate(&e1).unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(z.evaluate(&e1).unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(u.evaluate(&e1).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn un_pair_zero_set() {
        let pair = un_pair(1).unwrap();
        // X1 at 2 e1 = (|2 e1|^2 - 1) (0, 2) = (0, 6)
        assert_eq!(pair.x1.evaluate(&[2.0, 0.0]).unwrap(), vec![0.0, 6.0]);
        // unit sphere and origin are exact zeros
        assert_eq!(pair.x1.evaluate(&[1.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let ang: f64 = 0.3;
        let v = pair.x1.evaluate(&[ang.cos(), ang.sin()]).unwrap();
        assert!(v.iter().all(|&c| c.abs() < 1e-15));
        assert_eq!(pair.x1.evaluate(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn default_bumps_validate() {
        let bumps = BumpTriple::default_paper();
        bumps.validate().unwrap();
    }

    #[test]
    fn sp_pair_interval_values() {
        let pair = sp_pair(1, &BumpTriple::default_paper()).unwrap();
        let (y, z, _) = quaternionic_fields(1);
        // |x|^2 = 6.25 in I1: X1 = Y
        let p = [2.5, 0.0, 0.0, 0.0];
        assert_eq!(
            pair.x1.evaluate(&p).unwrap(),
            y.evaluate(&p).unwrap()
        );
        // |x|^2 = 1: X1 = 0
        let q = [1.0, 0.0, 0.0, 0.0];
        assert!(pair
            .x1
            .evaluate(&q)
            .unwrap()
            .iter()
            .all(|&c| c.abs() < 1e-12));
        // |x|^2 = 20 in I2: X1 = Z
        let w = [20.0f64.sqrt(), 0.0, 0.0, 0.0];
        let x1w = pair.x1.evaluate(&w).unwrap();
        let zw = z.evaluate(&w).unwrap();
        for (a, b) in x1w.iter().zip(&zw) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn hopf_twist_is_norm_preserving_and_nonlinear() {
        let lam = hopf_twist_default();
        assert!(!lam.is_linear());
        let mut rng_state = 1u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((rng_state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
        };
        for _ in 0..50 {
            let p: Vec<f64> = (0..4).map(|_| 2.0 * next()).collect();
            if p.iter().map(|x| x * x).sum::<f64>() < 1e-3 {
                continue;
            }
            let q = lam.evaluate(&p).unwrap();
            let np: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nq: f64 = q.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((np - nq).abs() < 1e-12, "phase rotation preserves norms");
        }
        // identity on the antipodal fiber z2 = 0
        let p = [1.3, -0.4, 0.0, 0.0];
        let q = lam.evaluate(&p).unwrap();
        for (a, b) in p.iter().zip(&q) {
            assert_eq!(a, b);
        }
        // rejects evaluation at the origin
        assert!(lam.evaluate(&[0.0; 4]).is_err());
    }

    #[test]
    fn hopf_twist_is_homogeneous() {
        let lam = hopf_twist_default();
        let p = [0.4, 0.3, -0.2, 0.9];
        let q = lam.evaluate(&p).unwrap();
        for c in [0.5, 2.0, 7.5] {
            let pc: Vec<f64> = p.iter().map(|x| c * x).collect();
            let qc = lam.evaluate(&pc).unwrap();
            for (a, b) in qc.iter().zip(&q) {
                assert!((a - c * b).abs() < 1e-12 * c.max(1.0));
            }
        }
    }

    #[test]
    fn hopf_rejects_bad_profiles() {
        // profile vanishing at the chart origin
        let zero_at_origin = mul(norm2(2), default_hopf_profile());
        assert!(hopf_twist(&zero_at_origin).is_err());
        // profile without compact support
        assert!(hopf_twist(&konst(1.0)).is_err());
    }

    #[test]
    fn product_field_components() {
        let x = product_field(1, 1, &[0.0]).unwrap();
        assert_eq!(x.evaluate(&[2.0, 0.7]).unwrap(), vec![2.0, 0.0]);
        let xv = product_field(2, 2, &[1.0, std::f64::consts::SQRT_2]).unwrap();
        let v = xv.evaluate(&[1.0, -1.0, 0.0, 0.0]).unwrap();
        assert_eq!(v[..2], [1.0, -1.0]);
        assert_eq!(v[2], 1.0);
    }

    #[test]
    fn jet_validation_accepts_default_and_rejects_low_order() {
        let h5 = dsl::jet5(2);
        validate_jet5(&h5, 2).unwrap();
        // x1^4 window has a nonzero 4-jet
        let h4 = mul(
            pow(coord(0), 4),
            plateau(norm2(2), -2.0, -1.0, 1.0, 4.0).unwrap(),
        );
        assert!(validate_jet5(&h4, 2).is_err());
        // x1^6 window has zero 5-jet
        let h6 = mul(
            pow(coord(0), 6),
            plateau(norm2(2), -2.0, -1.0, 1.0, 4.0).unwrap(),
        );
        assert!(validate_jet5(&h6, 2).is_err());
    }

    #[test]
    fn product_field_x1_cases() {
        let k = 1;
        let s = 1;
        let x = product_field(k, s, &[std::f64::consts::SQRT_2]).unwrap();
        let chart = Chart::product_rt(k, s);
        let v1 = VFieldExpr::new(chart, vec![konst(0.0), konst(1.0)]).unwrap();
        let h = dsl::jet5(k);
        let x1 = product_field_x1(k, s, &v1, &h, &x).unwrap();
        // at x = 0: X1 = V1
        assert_eq!(x1.evaluate(&[0.0, 0.3]).unwrap(), vec![0.0, 1.0]);
        // horizontal part is h(x) * x
        let p = [0.5, 1.0];
        let hv = h.eval(&[0.5]);
        let v = x1.evaluate(&p).unwrap();
        assert!((v[0] - hv * 0.5).abs() < 1e-15);
        // h = 0 gives back V1 (after replacing h by an admissible one)
        let x1_zero = v1.add(&x.scale_by(&konst(0.0))).unwrap();
        assert_eq!(x1_zero.evaluate(&p).unwrap(), vec![0.0, 1.0]);
        // non-vertical V1 is rejected
        let bad = VFieldExpr::new(chart, vec![coord(0), konst(1.0)]).unwrap();
        assert!(product_field_x1(k, s, &bad, &h, &x).is_err());
    }
}
