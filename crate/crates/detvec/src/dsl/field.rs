//! Vector fields and smooth self-maps on charts.

use super::chart::Chart;
use super::expr::{self, differentiate, mul, substitute, ScalarExpr, E};
use super::validate;
use crate::error::{Error, Result};
use crate::linalg::RMat;
use nalgebra::DVector;
use std::fmt;

/// A vector field: one scalar component per chart coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct VFieldExpr {
    chart: Chart,
    components: Vec<E>,
}

impl VFieldExpr {
    pub fn new(chart: Chart, components: Vec<E>) -> Result<Self> {
        if components.len() != chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: chart.dim(),
                got: components.len(),
            });
        }
        for c in &components {
            validate::check_field_component(c, &chart)?;
            check_coord_range(c, &chart)?;
        }
        Ok(VFieldExpr { chart, components })
    }

    pub fn zero(chart: Chart) -> Self {
        let components = (0..chart.dim()).map(|_| expr::konst(0.0)).collect();
        VFieldExpr { chart, components }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[E] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &E {
        &self.components[i]
    }

    pub fn evaluate(&self, p: &[f64]) -> Result<Vec<f64>> {
        check_domain(&self.chart, p)?;
        let mut out = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let v = c.eval(p);
            if !v.is_finite() {
                return Err(Error::Domain {
                    point: p.to_vec(),
                    msg: "field component evaluated to a non-finite value".into(),
                });
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Componentwise sum.
    pub fn add(&self, other: &VFieldExpr) -> Result<VFieldExpr> {
        check_charts(&self.chart, &other.chart)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| expr::add(a.clone(), b.clone()))
            .collect();
        Ok(VFieldExpr {
            chart: self.chart,
            components,
        })
    }

    /// Multiply every component by a scalar expression.
    pub fn scale_by(&self, f: &E) -> VFieldExpr {
        let components = self
            .components
            .iter()
            .map(|c| mul(f.clone(), c.clone()))
            .collect();
        VFieldExpr {
            chart: self.chart,
            components,
        }
    }

    /// Norm of the field value at a point.
    pub fn magnitude(&self, p: &[f64]) -> Result<f64> {
        Ok(DVector::from_vec(self.evaluate(p)?).norm())
    }
}

impl fmt::Display for VFieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_components(f, &self.chart, &self.components)
    }
}

/// A smooth self-map of a chart, with a linearity tag carrying the matrix
/// when the map is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct MapExpr {
    chart: Chart,
    components: Vec<E>,
    jacobian: Vec<Vec<E>>,
    linear: Option<RMat>,
}

impl MapExpr {
    pub fn new(chart: Chart, components: Vec<E>) -> Result<Self> {
        if components.len() != chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: chart.dim(),
                got: components.len(),
            });
        }
        let k = chart.x_dim();
        for (i, c) in components.iter().enumerate() {
            check_coord_range(c, &chart)?;
            if i < k {
                validate::check_field_component(c, &chart)?;
            } else {
                validate::check_map_theta_component(c, &chart)?;
            }
        }
        let linear = validate::detect_linear(&components, &chart);
        let jacobian = build_jacobian(&components, chart.dim());
        Ok(MapExpr {
            chart,
            components,
            jacobian,
            linear,
        })
    }

    /// Linear map from a matrix; components are built from the entries and
    /// evaluation goes through the matrix itself.
    pub fn linear(chart: Chart, a: RMat) -> Result<Self> {
        let n = chart.dim();
        if chart.theta_dim() != 0 {
            return Err(Error::InvalidInput(
                "linear maps live on Euclidean charts".into(),
            ));
        }
        if a.nrows() != n || a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.nrows(),
            });
        }
        let mut components = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = expr::konst(0.0);
            for j in 0..n {
                let c = a[(i, j)];
                if c != 0.0 {
                    acc = expr::add(acc, mul(expr::konst(c), expr::coord(j)));
                }
            }
            components.push(acc);
        }
        let jacobian = build_jacobian(&components, n);
        Ok(MapExpr {
            chart,
            components,
            jacobian,
            linear: Some(a),
        })
    }

    pub fn identity(chart: Chart) -> Self {
        let components: Vec<E> = (0..chart.dim()).map(expr::coord).collect();
        let jacobian = build_jacobian(&components, chart.dim());
        let linear = if chart.theta_dim() == 0 {
            Some(RMat::identity(chart.dim(), chart.dim()))
        } else {
            None
        };
        MapExpr {
            chart,
            components,
            jacobian,
            linear,
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[E] {
        &self.components
    }

    pub fn linear_matrix(&self) -> Option<&RMat> {
        self.linear.as_ref()
    }

    pub fn is_linear(&self) -> bool {
        self.linear.is_some()
    }

    pub fn evaluate(&self, p: &[f64]) -> Result<Vec<f64>> {
        check_domain(&self.chart, p)?;
        if let Some(a) = &self.linear {
            let v = a * DVector::from_row_slice(p);
            return Ok(v.iter().copied().collect());
        }
        let mut out = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let v = c.eval(p);
            if !v.is_finite() {
                return Err(Error::Domain {
                    point: p.to_vec(),
                    msg: "map component evaluated to a non-finite value".into(),
                });
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Jacobian from the exact partial derivatives (the stored matrix for
    /// linear maps).
    pub fn jacobian_at(&self, p: &[f64]) -> Result<RMat> {
        if let Some(a) = &self.linear {
            return Ok(a.clone());
        }
        check_domain(&self.chart, p)?;
        let n = self.chart.dim();
        let mut out = RMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let v = self.jacobian[i][j].eval(p);
                if !v.is_finite() {
                    return Err(Error::Domain {
                        point: p.to_vec(),
                        msg: "jacobian entry evaluated to a non-finite value".into(),
                    });
                }
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// Composition self after other: (self . other)(p) = self(other(p)).
    pub fn compose(&self, other: &MapExpr) -> Result<MapExpr> {
        check_charts(&self.chart, &other.chart)?;
        if let (Some(a), Some(b)) = (&self.linear, &other.linear) {
            return MapExpr::linear(self.chart, a * b);
        }
        let components: Vec<E> = self
            .components
            .iter()
            .map(|c| substitute(c, &other.components))
            .collect();
        MapExpr::new(self.chart, components)
    }
}

impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_components(f, &self.chart, &self.components)
    }
}

fn write_components(f: &mut fmt::Formatter<'_>, chart: &Chart, components: &[E]) -> fmt::Result {
    write!(f, "[")?;
    for (i, c) in components.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{}", super::print::display_in_chart(c, chart))?;
    }
    write!(f, "]")
}

fn build_jacobian(components: &[E], n: usize) -> Vec<Vec<E>> {
    components
        .iter()
        .map(|c| (0..n).map(|j| differentiate(c, j)).collect())
        .collect()
}

fn check_charts(a: &Chart, b: &Chart) -> Result<()> {
    if !a.compatible(b) {
        return Err(Error::ChartMismatch(a.to_string(), b.to_string()));
    }
    Ok(())
}

fn check_domain(chart: &Chart, p: &[f64]) -> Result<()> {
    if p.len() != chart.dim() {
        return Err(Error::DimensionMismatch {
            expected: chart.dim(),
            got: p.len(),
        });
    }
    if chart.is_punctured() && p.iter().all(|&x| x == 0.0) {
        return Err(Error::Domain {
            point: p.to_vec(),
            msg: "the origin is outside the declared domain".into(),
        });
    }
    Ok(())
}

fn check_coord_range(e: &E, chart: &Chart) -> Result<()> {
    let n = chart.dim();
    fn max_coord(e: &E) -> Option<usize> {
        match &**e {
            ScalarExpr::Const(_) => None,
            ScalarExpr::Coord(i) => Some(*i),
            ScalarExpr::Add(a, b)
            | ScalarExpr::Sub(a, b)
            | ScalarExpr::Mul(a, b)
            | ScalarExpr::Div(a, b) => match (max_coord(a), max_coord(b)) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
            ScalarExpr::Neg(a)
            | ScalarExpr::Pow(a, _)
            | ScalarExpr::Sin(a)
            | ScalarExpr::Cos(a)
            | ScalarExpr::Plateau { arg: a, .. }
            | ScalarExpr::Glue { arg: a, .. } => max_coord(a),
            ScalarExpr::Norm2 { dim } => {
                if *dim == 0 {
                    None
                } else {
                    Some(dim - 1)
                }
            }
        }
    }
    if let Some(m) = max_coord(e) {
        if m >= n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: m + 1,
            });
        }
    }
    Ok(())
}

/// Pushforward residual R(p) = DF(p) X(p) - X(F(p)); F preserves X iff
/// R vanishes identically, and the formulation avoids inverting F.
pub fn pushforward_residual(f: &MapExpr, x: &VFieldExpr, p: &[f64]) -> Result<Vec<f64>> {
    check_charts(f.chart(), x.chart())?;
    if let Some(a) = f.linear_matrix() {
        let xp = DVector::from_vec(x.evaluate(p)?);
        let fp = a * DVector::from_row_slice(p);
        let x_fp = DVector::from_vec(x.evaluate(fp.as_slice())?);
        return Ok((a * xp - x_fp).iter().copied().collect());
    }
    let xp = DVector::from_vec(x.evaluate(p)?);
    let jac = f.jacobian_at(p)?;
    let fp = f.evaluate(p)?;
    let x_fp = DVector::from_vec(x.evaluate(&fp)?);
    Ok((jac * xp - x_fp).iter().copied().collect())
}

/// Exact symbolic Lie bracket [X, Y] = DY X - DX Y.
pub fn lie_bracket_fields(x: &VFieldExpr, y: &VFieldExpr) -> Result<VFieldExpr> {
    check_charts(x.chart(), y.chart())?;
    let n = x.chart().dim();
    let mut components = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = expr::konst(0.0);
        for j in 0..n {
            let dy = differentiate(y.component(i), j);
            let dx = differentiate(x.component(i), j);
            acc = expr::add(
                acc,
                expr::sub(
                    mul(dy, x.component(j).clone()),
                    mul(dx, y.component(j).clone()),
                ),
            );
        }
        components.push(acc);
    }
    VFieldExpr::new(*x.chart(), components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::expr::{coord, konst, pow};

    fn radial(m: usize) -> VFieldExpr {
        VFieldExpr::new(Chart::euclidean(m), (0..m).map(coord).collect()).unwrap()
    }

    #[test]
    fn identity_map_has_zero_residual() {
        let xi = radial(3);
        let id = MapExpr::identity(Chart::euclidean(3));
        let r = pushforward_residual(&id, &xi, &[0.3, -1.0, 2.0]).unwrap();
        assert!(r.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_maps_preserve_radial_exactly() {
        let xi = radial(2);
        let a = RMat::from_row_slice(2, 2, &[1.25, -0.5, 2.0, 0.75]);
        let f = MapExpr::linear(Chart::euclidean(2), a).unwrap();
        let r = pushforward_residual(&f, &xi, &[0.7, -0.2]).unwrap();
        assert!(r.iter().all(|&v| v == 0.0), "exact zero, same matvec path");
    }

    #[test]
    fn bracket_radial_with_constant_field() {
        // [xi, d/dx1] = -d/dx1
        let xi = radial(2);
        let e1 = VFieldExpr::new(
            Chart::euclidean(2),
            vec![konst(1.0), konst(0.0)],
        )
        .unwrap();
        let br = lie_bracket_fields(&xi, &e1).unwrap();
        let v = br.evaluate(&[0.4, 1.7]).unwrap();
        assert_eq!(v, vec![-1.0, 0.0]);
    }

    #[test]
    fn bracket_antisymmetry_on_radial() {
        let xi = radial(2);
        let br = lie_bracket_fields(&xi, &xi).unwrap();
        let v = br.evaluate(&[0.5, -0.1]).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn hand_expanded_bracket() {
        // [x1 d/dx2, x2 d/dx1] = x1 d/dx1 - x2 d/dx2
        let chart = Chart::euclidean(2);
        let x_field = VFieldExpr::new(chart, vec![konst(0.0), coord(0)]).unwrap();
        let y_field = VFieldExpr::new(chart, vec![coord(1), konst(0.0)]).unwrap();
        let br = lie_bracket_fields(&x_field, &y_field).unwrap();
        for p in [[0.3, 0.8], [1.0, -2.0], [0.0, 0.0]] {
            let v = br.evaluate(&p).unwrap();
            assert!((v[0] - p[0]).abs() < 1e-15);
            assert!((v[1] + p[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_detection_from_parsed_components() {
        let chart = Chart::euclidean(2);
        let comps = vec![
            expr::add(konst(0.0), mul(konst(2.0), coord(0))),
            coord(1),
        ];
        let f = MapExpr::new(chart, comps).unwrap();
        let a = f.linear_matrix().expect("detected linear");
        assert_eq!(a[(0, 0)], 2.0);
        assert_eq!(a[(1, 1)], 1.0);

        let nonlin = MapExpr::new(chart, vec![pow(coord(0), 2), coord(1)]).unwrap();
        assert!(nonlin.linear_matrix().is_none());
    }

    #[test]
    fn punctured_chart_rejects_origin() {
        let chart = Chart::euclidean_punctured(2);
        let f = VFieldExpr::new(chart, vec![coord(0), coord(1)]).unwrap();
        assert!(f.evaluate(&[0.0, 0.0]).is_err());
        assert!(f.evaluate(&[0.0, 1.0]).is_ok());
    }

    #[test]
    fn field_rejects_bare_theta_component() {
        let chart = Chart::product_rt(1, 1);
        // th1 as a field component is not periodic
        assert!(VFieldExpr::new(chart, vec![konst(0.0), coord(1)]).is_err());
        // sin(th1) is fine
        assert!(VFieldExpr::new(
            chart,
            vec![konst(0.0), expr::sin(coord(1))],
        )
        .is_ok());
    }

    #[test]
    fn map_allows_integer_winding() {
        let chart = Chart::product_rt(1, 1);
        // (x1, th1 + x1^2) is a valid bundle map
        let f = MapExpr::new(
            chart,
            vec![coord(0), expr::add(coord(1), pow(coord(0), 2))],
        );
        assert!(f.is_ok());
        // (x1, x1 * th1) is not
        assert!(MapExpr::new(chart, vec![coord(0), mul(coord(0), coord(1))]).is_err());
    }
}
