//! Trajectory closure classification for X = xi + V on R^k x T^s.
//!
//! The flow is e^t x on the Euclidean factor and a straight winding line
//! on the torus, so the classification is analytic: a trajectory has
//! compact adherence iff its Euclidean part starts at 0, and then the
//! closure is the subtorus whose dimension is the rational rank of the
//! frequency vector.

use crate::error::{Error, Result};
use crate::lie::{integer_relation, rational_rank};
use crate::linalg::RVec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosureClass {
    FixedPoint,
    TorusClosure(usize),
    Unbounded,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosureReport {
    pub class: ClosureClass,
    /// Integer relations annihilating the frequency vector (empty when
    /// none were found within the search budget).
    pub relations: Vec<Vec<i64>>,
}

/// Classifies the X-trajectory of p0 for X = product_field(k, s, v).
pub fn trajectory_closure_class(
    k: usize,
    s: usize,
    v: &[f64],
    p0: &[f64],
) -> Result<ClosureReport> {
    if v.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            got: v.len(),
        });
    }
    if p0.len() != k + s {
        return Err(Error::DimensionMismatch {
            expected: k + s,
            got: p0.len(),
        });
    }
    let x_is_zero = p0[..k].iter().all(|&c| c == 0.0);
    if !x_is_zero {
        return Ok(ClosureReport {
            class: ClosureClass::Unbounded,
            relations: Vec::new(),
        });
    }
    if v.iter().all(|&c| c == 0.0) {
        return Ok(ClosureReport {
            class: ClosureClass::FixedPoint,
            relations: Vec::new(),
        });
    }
    let vv = RVec::from_row_slice(v);
    let dim = rational_rank(&[vv.clone()]);
    let mut relations = Vec::new();
    let mut constraints = vec![vv];
    while let Some(r) = integer_relation(&constraints) {
        constraints.push(RVec::from_iterator(s, r.iter().map(|&x| x as f64)));
        relations.push(r);
        if relations.len() >= s {
            break;
        }
    }
    Ok(ClosureReport {
        class: ClosureClass::TorusClosure(dim.max(1)),
        relations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn irrational_winding_fills_torus() {
        let r =
            trajectory_closure_class(1, 2, &[1.0, std::f64::consts::SQRT_2], &[0.0, 0.1, 0.2])
                .unwrap();
        assert_eq!(r.class, ClosureClass::TorusClosure(2));
    }

    #[test]
    fn rational_winding_closes_circle() {
        let r = trajectory_closure_class(1, 2, &[1.0, 2.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.class, ClosureClass::TorusClosure(1));
        assert!(!r.relations.is_empty());
    }

    #[test]
    fn nonzero_base_point_is_unbounded() {
        let r = trajectory_closure_class(1, 2, &[1.0, 2.0], &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.class, ClosureClass::Unbounded);
    }

    #[test]
    fn zero_field_fixes_points() {
        let r = trajectory_closure_class(2, 1, &[0.0], &[0.0, 0.0, 0.3]).unwrap();
        assert_eq!(r.class, ClosureClass::FixedPoint);
    }
}
