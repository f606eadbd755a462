//! Algebra and group operations: exponential, bracket, generated
//! subalgebras, dense couples, adjoint transport, isotropy algebras.

use super::{check_same_spec, AlgebraElement, Family, GroupElement, Spec};
use crate::error::{Error, Result};
use crate::linalg::{expm, nullspace, rank_of_rows, vectorize_real, RMat, RVec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Matrix exponential into the group, validated against the membership
/// residual of the element's spec.
pub fn exp_matrix(a: &AlgebraElement) -> Result<GroupElement> {
    GroupElement::new(a.spec(), expm(a.matrix()))
}

/// Lie bracket [A, B] = AB - BA.
pub fn bracket(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    check_same_spec(a.spec(), b.spec())?;
    let m = a.matrix() * b.matrix() - b.matrix() * a.matrix();
    AlgebraElement::new(a.spec(), m)
}

/// Dimension of the smallest bracket-closed subspace containing A and B.
///
/// Iterates brackets of the current basis and extends it while the rank
/// grows; terminates because the dimension is bounded by the algebra's.
pub fn generated_subalgebra_dim(a: &AlgebraElement, b: &AlgebraElement) -> Result<usize> {
    check_same_spec(a.spec(), b.spec())?;
    let spec = a.spec();
    let normalize = |e: &AlgebraElement| -> Option<AlgebraElement> {
        let n = e.norm();
        if n < 1e-14 {
            None
        } else {
            Some(e.scale(1.0 / n))
        }
    };
    let mut basis: Vec<AlgebraElement> = Vec::new();
    let mut vecs: Vec<RVec> = Vec::new();
    let mut push_if_new = |elem: AlgebraElement, basis: &mut Vec<AlgebraElement>, vecs: &mut Vec<RVec>| {
        let v = elem.vectorized();
        let mut trial = vecs.clone();
        trial.push(v.clone());
        if rank_of_rows(&trial) > vecs.len() {
            basis.push(elem);
            vecs.push(v);
            true
        } else {
            false
        }
    };
    for seed in [a, b] {
        if let Some(e) = normalize(seed) {
            push_if_new(e, &mut basis, &mut vecs);
        }
    }
    loop {
        let mut grew = false;
        let current = basis.clone();
        for i in 0..current.len() {
            for j in (i + 1)..current.len() {
                let br = bracket(&current[i], &current[j])?;
                if let Some(e) = normalize(&br) {
                    grew |= push_if_new(e, &mut basis, &mut vecs);
                }
            }
        }
        if !grew || basis.len() >= spec.algebra_dim() {
            break;
        }
    }
    Ok(basis.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DenseVerdict {
    Dense,
    NotDense,
    /// No integer relation found within the search budget, but the
    /// numbers' irrationality is unproven; never silently upgraded.
    ProbablyDense,
}

impl std::fmt::Display for DenseVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DenseVerdict::Dense => "Dense",
            DenseVerdict::NotDense => "NotDense",
            DenseVerdict::ProbablyDense => "ProbablyDense",
        };
        write!(f, "{s}")
    }
}

/// Is the connected subgroup generated by A and B dense in the group?
///
/// For the matrix families the subalgebra criterion decides: a dense
/// connected subgroup of a compact group contains the commutator subgroup,
/// which for SO/SU/U/Sp forces the full algebra, so a proper generated
/// subalgebra means not dense. For a torus the question is rational
/// independence of the frequency span, decided by a bounded lattice
/// search.
pub fn is_dense_couple(
    spec: &Spec,
    a: &AlgebraElement,
    b: &AlgebraElement,
) -> Result<DenseVerdict> {
    check_same_spec(a.spec(), spec)?;
    check_same_spec(b.spec(), spec)?;
    match spec.family() {
        Family::Torus => {
            let fa = a.frequencies().expect("torus element");
            let fb = b.frequencies().expect("torus element");
            let span = vec![RVec::from_row_slice(&fa), RVec::from_row_slice(&fb)];
            let nonzero: Vec<RVec> = span.iter().filter(|v| v.norm() > 1e-14).cloned().collect();
            if rank_of_rows(&nonzero) == spec.algebra_dim() {
                return Ok(DenseVerdict::Dense);
            }
            match super::relations::integer_relation(&span) {
                Some(_) => Ok(DenseVerdict::NotDense),
                None => Ok(DenseVerdict::ProbablyDense),
            }
        }
        _ => {
            let dim = generated_subalgebra_dim(a, b)?;
            if dim == spec.algebra_dim() {
                Ok(DenseVerdict::Dense)
            } else {
                Ok(DenseVerdict::NotDense)
            }
        }
    }
}

/// Adjoint transport g A g^{-1}.
pub fn adjoint(g: &GroupElement, a: &AlgebraElement) -> Result<AlgebraElement> {
    check_same_spec(g.spec(), a.spec())?;
    let inv = g
        .matrix()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("adjoint of singular element".into()))?;
    let m = g.matrix() * a.matrix() * inv;
    // Conjugation preserves the algebra up to rounding; rebuild through the
    // validated constructor with a slightly relaxed check.
    let spec = a.spec();
    let residual = spec.algebra_residual(&m);
    if residual > 1e-10 * (1.0 + m.norm()) {
        return Err(Error::Membership {
            residual,
            tol: 1e-10 * (1.0 + m.norm()),
        });
    }
    Ok(AlgebraElement {
        matrix: m,
        spec: spec.clone(),
    })
}

/// Basis of the isotropy algebra of a point in the (realified) standard
/// representation space: nullspace of A -> A x over the algebra. An empty
/// basis certifies a locally free point.
pub fn isotropy_algebra(spec: &Spec, x: &[f64]) -> Result<Vec<AlgebraElement>> {
    let m = spec.real_dim();
    if x.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: x.len(),
        });
    }
    let xv = RVec::from_row_slice(x);
    let real_basis = spec.real_algebra_basis();
    let mat = RMat::from_fn(m, real_basis.len(), |i, j| (&real_basis[j] * &xv)[i]);
    let coeff_basis = nullspace(&mat);
    let raw = spec.raw_basis();
    let out = coeff_basis
        .iter()
        .map(|coeffs| {
            let mut acc = crate::linalg::cmat_zeros(spec.matrix_dim());
            for (c, b) in coeffs.iter().zip(raw.iter()) {
                acc += b * Complex64::new(*c, 0.0);
            }
            AlgebraElement {
                matrix: acc,
                spec: spec.clone(),
            }
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::GroupSpec;
    use crate::linalg::{cmat_from_real, CMat};
    use nalgebra::DMatrix;

    fn so3_generators(spec: &Spec) -> (AlgebraElement, AlgebraElement, AlgebraElement) {
        // L_x, L_y, L_z with [L_x, L_y] = L_z cyclically
        let lx = RMat::from_row_slice(
            3,
            3,
            &[0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0],
        );
        let ly = RMat::from_row_slice(
            3,
            3,
            &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0],
        );
        let lz = RMat::from_row_slice(
            3,
            3,
            &[0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        );
        (
            AlgebraElement::from_real(spec, lx).unwrap(),
            AlgebraElement::from_real(spec, ly).unwrap(),
            AlgebraElement::from_real(spec, lz).unwrap(),
        )
    }

    use crate::linalg::RMat;

    #[test]
    fn exp_of_zero_is_identity() {
        let spec = GroupSpec::so(3).unwrap();
        let zero = AlgebraElement::from_real(&spec, RMat::zeros(3, 3)).unwrap();
        let g = exp_matrix(&zero).unwrap();
        assert!((g.matrix() - CMat::identity(3, 3)).norm() < 1e-15);
    }

    #[test]
    fn bracket_standard_so3() {
        let spec = GroupSpec::so(3).unwrap();
        let (lx, ly, lz) = so3_generators(&spec);
        let br = bracket(&lx, &ly).unwrap();
        assert!((br.matrix() - lz.matrix()).norm() < 1e-14);
        let self_br = bracket(&lx, &lx).unwrap();
        assert!(self_br.norm() < 1e-15);
    }

    #[test]
    fn torus_brackets_vanish() {
        let spec = GroupSpec::torus(3).unwrap();
        let a = AlgebraElement::torus_frequencies(&spec, &[1.0, 2.0, 3.0]).unwrap();
        let b = AlgebraElement::torus_frequencies(&spec, &[0.5, -1.0, 0.1]).unwrap();
        assert!(bracket(&a, &b).unwrap().norm() < 1e-15);
    }

    #[test]
    fn su2_pauli_pair_generates_everything() {
        let spec = GroupSpec::su(2).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let half = Complex64::new(0.5, 0.0);
        let sz = DMatrix::from_row_slice(
            2,
            2,
            &[i * half, 0.0.into(), 0.0.into(), -i * half],
        );
        let sx = DMatrix::from_row_slice(
            2,
            2,
            &[0.0.into(), i * half, i * half, 0.0.into()],
        );
        let a = AlgebraElement::new(&spec, sz).unwrap();
        let b = AlgebraElement::new(&spec, sx).unwrap();
        assert_eq!(generated_subalgebra_dim(&a, &b).unwrap(), 3);
        assert_eq!(is_dense_couple(&spec, &a, &b).unwrap(), DenseVerdict::Dense);
        // equal nonzero generators span a line
        assert_eq!(generated_subalgebra_dim(&a, &a).unwrap(), 1);
        assert_eq!(
            is_dense_couple(&spec, &a, &a).unwrap(),
            DenseVerdict::NotDense
        );
    }

    #[test]
    fn torus_dense_couple_verdicts() {
        let spec = GroupSpec::torus(2).unwrap();
        let mk = |f: &[f64]| AlgebraElement::torus_frequencies(&spec, f).unwrap();
        // rational line
        assert_eq!(
            is_dense_couple(&spec, &mk(&[1.0, 0.0]), &mk(&[2.0, 0.0])).unwrap(),
            DenseVerdict::NotDense
        );
        // full span
        assert_eq!(
            is_dense_couple(&spec, &mk(&[1.0, 0.0]), &mk(&[0.0, std::f64::consts::SQRT_2]))
                .unwrap(),
            DenseVerdict::Dense
        );
        // irrational line: no relation found, irrationality unproven
        assert_eq!(
            is_dense_couple(
                &spec,
                &mk(&[1.0, std::f64::consts::SQRT_2]),
                &mk(&[2.0, 2.0 * std::f64::consts::SQRT_2])
            )
            .unwrap(),
            DenseVerdict::ProbablyDense
        );
    }

    #[test]
    fn commuting_independent_torus_pair_spans_two() {
        let spec = GroupSpec::torus(3).unwrap();
        let a = AlgebraElement::torus_frequencies(&spec, &[1.0, 0.0, 0.0]).unwrap();
        let b = AlgebraElement::torus_frequencies(&spec, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(generated_subalgebra_dim(&a, &b).unwrap(), 2);
    }

    #[test]
    fn adjoint_identity_and_rotation() {
        let spec = GroupSpec::so(3).unwrap();
        let (lx, ly, _) = so3_generators(&spec);
        let e = spec.identity();
        let a = adjoint(&e, &lx).unwrap();
        assert!((a.matrix() - lx.matrix()).norm() < 1e-15);

        // rotation by pi/2 about z maps L_x to L_y
        let c = 0.0f64;
        let s = 1.0f64;
        let rz = RMat::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
        let g = GroupElement::new(&spec, cmat_from_real(&rz)).unwrap();
        let out = adjoint(&g, &lx).unwrap();
        assert!(
            (out.matrix() - ly.matrix()).norm() < 1e-12,
            "Ad of quarter turn about z sends L_x to L_y"
        );
    }

    #[test]
    fn isotropy_dimensions() {
        let so3 = GroupSpec::so(3).unwrap();
        assert_eq!(isotropy_algebra(&so3, &[0.0, 0.0, 0.0]).unwrap().len(), 3);
        let basis = isotropy_algebra(&so3, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(basis.len(), 1);
        // the stabilizer direction kills e1
        let act = basis[0].matrix();
        let e1 = nalgebra::DVector::from_row_slice(&[
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        assert!((act * e1).norm() < 1e-12);

        let u2 = GroupSpec::unitary(2).unwrap();
        // x = (1, 0) in C^2, realified
        assert_eq!(
            isotropy_algebra(&u2, &[1.0, 0.0, 0.0, 0.0]).unwrap().len(),
            1
        );
    }
}
