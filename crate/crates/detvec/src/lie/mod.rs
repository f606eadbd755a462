//! Compact matrix Lie groups and their Lie algebras.
//!
//! A [`GroupSpec`] fixes the family (SO, SU, U, Sp, torus), the matrix
//! dimension and an ordered algebra basis. Elements carry a reference to
//! their spec and are validated against the family's defining constraints
//! on construction.
//!
//! Sp(r) is realized inside SO(4r) as the matrices commuting with the
//! three complex structures J, K, L (left multiplications by i, j, k on
//! H^r = R^{4r}), so its membership residual includes the three
//! commutators.

mod e62;
mod haar;
mod ops;
mod relations;

pub use e62::{e62_in_open_disc, e62_invariants, is_free_point_e62};
pub use haar::{
    gaussian_matrix, haar_orthogonal, haar_sample, haar_sample_with, haar_unitary_matrix,
    rng_for_seed, rng_for_task,
};
pub use ops::{
    adjoint, bracket, exp_matrix, generated_subalgebra_dim, is_dense_couple, isotropy_algebra,
    DenseVerdict,
};
pub use relations::{integer_relation, rational_rank, RELATION_SEARCH_BUDGET};

use crate::error::{Error, Result};
use crate::linalg::{
    cmat_from_real, dagger, imag_norm, realify_interleaved, vectorize_real, CMat, RMat,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Shared handle to a group spec; elements keep one of these.
pub type Spec = Arc<GroupSpec>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    SO,
    SU,
    U,
    Sp,
    Torus,
    /// R^k x T^s product charts use this tag; it is not a compact matrix
    /// group, so every group-level operation rejects it.
    ProductRT,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::SO => "SO",
            Family::SU => "SU",
            Family::U => "U",
            Family::Sp => "Sp",
            Family::Torus => "Torus",
            Family::ProductRT => "ProductRT",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct GroupSpec {
    family: Family,
    param: usize,
    matrix_dim: usize,
    algebra_dim: usize,
    algebra_basis: Vec<CMat>,
    /// J, K, L for Sp(r); empty otherwise.
    structures: Vec<RMat>,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.param == other.param
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.param)
    }
}

impl GroupSpec {
    pub fn new(family: Family, param: usize) -> Result<Spec> {
        if param == 0 {
            return Err(Error::InvalidInput("group parameter must be >= 1".into()));
        }
        let spec = match family {
            Family::SO => {
                if param < 2 {
                    return Err(Error::InvalidInput("SO(n) needs n >= 2".into()));
                }
                GroupSpec {
                    family,
                    param,
                    matrix_dim: param,
                    algebra_dim: param * (param - 1) / 2,
                    algebra_basis: so_basis(param),
                    structures: Vec::new(),
                }
            }
            Family::SU => GroupSpec {
                family,
                param,
                matrix_dim: param,
                algebra_dim: param * param - 1,
                algebra_basis: su_basis(param),
                structures: Vec::new(),
            },
            Family::U => GroupSpec {
                family,
                param,
                matrix_dim: param,
                algebra_dim: param * param,
                algebra_basis: u_basis(param),
                structures: Vec::new(),
            },
            Family::Sp => {
                let structures = quaternion_structures(param);
                let basis = sp_basis(param, &structures);
                GroupSpec {
                    family,
                    param,
                    matrix_dim: 4 * param,
                    algebra_dim: param * (2 * param + 1),
                    algebra_basis: basis,
                    structures,
                }
            }
            Family::Torus => GroupSpec {
                family,
                param,
                matrix_dim: param,
                algebra_dim: param,
                algebra_basis: torus_basis(param),
                structures: Vec::new(),
            },
            Family::ProductRT => {
                return Err(Error::UnsupportedFamily(
                    "ProductRT tags product charts, not a compact matrix group".into(),
                ))
            }
        };
        debug_assert_eq!(spec.algebra_basis.len(), spec.algebra_dim);
        Ok(Arc::new(spec))
    }

    pub fn so(n: usize) -> Result<Spec> {
        GroupSpec::new(Family::SO, n)
    }
    pub fn su(m: usize) -> Result<Spec> {
        GroupSpec::new(Family::SU, m)
    }
    pub fn unitary(m: usize) -> Result<Spec> {
        GroupSpec::new(Family::U, m)
    }
    pub fn sp(r: usize) -> Result<Spec> {
        GroupSpec::new(Family::Sp, r)
    }
    pub fn torus(s: usize) -> Result<Spec> {
        GroupSpec::new(Family::Torus, s)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn param(&self) -> usize {
        self.param
    }

    pub fn matrix_dim(&self) -> usize {
        self.matrix_dim
    }

    pub fn algebra_dim(&self) -> usize {
        self.algebra_dim
    }

    /// J, K, L when the family is Sp; empty slice otherwise.
    pub fn structures(&self) -> &[RMat] {
        &self.structures
    }

    pub fn algebra_basis(self: &Spec) -> Vec<AlgebraElement> {
        self.algebra_basis
            .iter()
            .map(|m| AlgebraElement {
                matrix: m.clone(),
                spec: self.clone(),
            })
            .collect()
    }

    pub(crate) fn raw_basis(&self) -> &[CMat] {
        &self.algebra_basis
    }

    /// Dimension of the real vector space the standard representation
    /// acts on (complex families act on the realified C^m).
    pub fn real_dim(&self) -> usize {
        match self.family {
            Family::SO | Family::Sp => self.matrix_dim,
            Family::SU | Family::U | Family::Torus => 2 * self.matrix_dim,
            Family::ProductRT => unreachable!(),
        }
    }

    /// Whether the realified standard representation has an invariant
    /// complex structure equal to the block rotation J.
    pub fn is_complex_family(&self) -> bool {
        matches!(self.family, Family::SU | Family::U | Family::Torus)
    }

    /// Algebra basis as real matrices acting on R^{real_dim}.
    pub fn real_algebra_basis(&self) -> Vec<RMat> {
        self.algebra_basis
            .iter()
            .map(|m| self.realify(m))
            .collect()
    }

    pub fn realify(&self, m: &CMat) -> RMat {
        match self.family {
            Family::SO | Family::Sp => crate::linalg::real_part(m),
            Family::SU | Family::U | Family::Torus => realify_interleaved(m),
            Family::ProductRT => unreachable!(),
        }
    }

    /// Residual of the family's algebra constraints; zero on the algebra.
    pub fn algebra_residual(&self, m: &CMat) -> f64 {
        let n = self.matrix_dim;
        if m.nrows() != n || m.ncols() != n {
            return f64::INFINITY;
        }
        match self.family {
            Family::SO => (m + m.transpose()).norm() + imag_norm(m),
            Family::SU => {
                let tr: Complex64 = m.diagonal().iter().sum();
                (m + dagger(m)).norm() + tr.norm()
            }
            Family::U => (m + dagger(m)).norm(),
            Family::Sp => {
                let skew = (m + m.transpose()).norm() + imag_norm(m);
                let r = crate::linalg::real_part(m);
                let comm: f64 = self
                    .structures
                    .iter()
                    .map(|s| (&r * s - s * &r).norm())
                    .sum();
                skew + comm
            }
            Family::Torus => {
                let mut off = 0.0;
                let mut re_diag = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            re_diag += m[(i, j)].re * m[(i, j)].re;
                        } else {
                            off += m[(i, j)].norm_sqr();
                        }
                    }
                }
                off.sqrt() + re_diag.sqrt()
            }
            Family::ProductRT => f64::INFINITY,
        }
    }

    /// Residual of group membership; zero on the group.
    pub fn membership_residual(&self, g: &CMat) -> f64 {
        let n = self.matrix_dim;
        if g.nrows() != n || g.ncols() != n {
            return f64::INFINITY;
        }
        let id = CMat::identity(n, n);
        match self.family {
            Family::SO => {
                let ortho = (g.transpose() * g - &id).norm() + imag_norm(g);
                let det = g.determinant();
                ortho + (det - Complex64::new(1.0, 0.0)).norm()
            }
            Family::SU => {
                let unit = (dagger(g) * g - &id).norm();
                unit + (g.determinant() - Complex64::new(1.0, 0.0)).norm()
            }
            Family::U => {
                let unit = (dagger(g) * g - &id).norm();
                unit + (g.determinant().norm() - 1.0).abs()
            }
            Family::Sp => {
                let ortho = (g.transpose() * g - &id).norm() + imag_norm(g);
                let det = (g.determinant() - Complex64::new(1.0, 0.0)).norm();
                let r = crate::linalg::real_part(g);
                let comm: f64 = self
                    .structures
                    .iter()
                    .map(|s| (&r * s - s * &r).norm())
                    .sum();
                ortho + det + comm
            }
            Family::Torus => {
                let mut off = 0.0;
                let mut phase = 0.0f64;
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            phase = phase.max((g[(i, j)].norm() - 1.0).abs());
                        } else {
                            off += g[(i, j)].norm_sqr();
                        }
                    }
                }
                off.sqrt() + phase
            }
            Family::ProductRT => f64::INFINITY,
        }
    }

    pub fn identity(self: &Spec) -> GroupElement {
        GroupElement {
            matrix: CMat::identity(self.matrix_dim, self.matrix_dim),
            spec: self.clone(),
        }
    }
}

pub(crate) const ALGEBRA_TOL: f64 = 1e-12;
pub(crate) const MEMBERSHIP_TOL: f64 = 1e-9;

/// Element of the Lie algebra of a [`GroupSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    matrix: CMat,
    spec: Spec,
}

impl AlgebraElement {
    pub fn new(spec: &Spec, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if matrix.nrows() != spec.matrix_dim {
            return Err(Error::DimensionMismatch {
                expected: spec.matrix_dim,
                got: matrix.nrows(),
            });
        }
        let residual = spec.algebra_residual(&matrix);
        let tol = ALGEBRA_TOL * (1.0 + matrix.norm());
        if residual > tol {
            return Err(Error::Membership { residual, tol });
        }
        Ok(AlgebraElement {
            matrix,
            spec: spec.clone(),
        })
    }

    pub fn from_real(spec: &Spec, matrix: RMat) -> Result<Self> {
        AlgebraElement::new(spec, cmat_from_real(&matrix))
    }

    /// Torus algebra element from its frequency vector.
    pub fn torus_frequencies(spec: &Spec, freq: &[f64]) -> Result<Self> {
        if spec.family != Family::Torus {
            return Err(Error::UnsupportedFamily(format!(
                "{spec} has no frequency-vector coordinates"
            )));
        }
        if freq.len() != spec.matrix_dim {
            return Err(Error::DimensionMismatch {
                expected: spec.matrix_dim,
                got: freq.len(),
            });
        }
        let m = DMatrix::from_fn(freq.len(), freq.len(), |i, j| {
            if i == j {
                Complex64::new(0.0, freq[i])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        AlgebraElement::new(spec, m)
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn spec(&self) -> &Spec {
        &self.spec
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn scale(&self, c: f64) -> AlgebraElement {
        AlgebraElement {
            matrix: &self.matrix * Complex64::new(c, 0.0),
            spec: self.spec.clone(),
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        check_same_spec(&self.spec, &other.spec)?;
        Ok(AlgebraElement {
            matrix: &self.matrix + &other.matrix,
            spec: self.spec.clone(),
        })
    }

    /// Frequency vector of a torus algebra element.
    pub fn frequencies(&self) -> Option<Vec<f64>> {
        if self.spec.family != Family::Torus {
            return None;
        }
        Some(self.matrix.diagonal().iter().map(|z| z.im).collect())
    }

    pub(crate) fn vectorized(&self) -> nalgebra::DVector<f64> {
        vectorize_real(&self.matrix)
    }
}

/// Element of the group of a [`GroupSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: CMat,
    spec: Spec,
}

impl GroupElement {
    pub fn new(spec: &Spec, matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.cols(),
            });
        }
        if matrix.nrows() != spec.matrix_dim {
            return Err(Error::DimensionMismatch {
                expected: spec.matrix_dim,
                got: matrix.nrows(),
            });
        }
        let residual = spec.membership_residual(&matrix);
        let tol = MEMBERSHIP_TOL * (1.0 + matrix.norm());
        if residual > tol {
            return Err(Error::Membership { residual, tol });
        }
        Ok(GroupElement {
            matrix,
            spec: spec.clone(),
        })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn spec(&self) -> &Spec {
        &self.spec
    }

    pub fn membership_residual(&self) -> f64 {
        self.spec.membership_residual(&self.matrix)
    }

    /// Matrix of the element acting on the realified representation space.
    pub fn real_matrix(&self) -> RMat {
        self.spec.realify(&self.matrix)
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement> {
        check_same_spec(&self.spec, &other.spec)?;
        Ok(GroupElement {
            matrix: &self.matrix * &other.matrix,
            spec: self.spec.clone(),
        })
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        let inv = self
            .matrix
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Singular("group element not invertible".into()))?;
        Ok(GroupElement {
            matrix: inv,
            spec: self.spec.clone(),
        })
    }
}

pub(crate) fn check_same_spec(a: &Spec, b: &Spec) -> Result<()> {
    if a != b {
        return Err(Error::SpecMismatch(a.to_string(), b.to_string()));
    }
    Ok(())
}

fn unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(n, n);
    m[(i, j)] = Complex64::new(1.0, 0.0);
    m
}

fn so_basis(n: usize) -> Vec<CMat> {
    let mut basis = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            basis.push(unit(n, i, j) - unit(n, j, i));
        }
    }
    basis
}

fn su_basis(m: usize) -> Vec<CMat> {
    let i_c = Complex64::new(0.0, 1.0);
    let mut basis = Vec::new();
    for j in 0..m {
        for k in (j + 1)..m {
            basis.push(unit(m, j, k) - unit(m, k, j));
            basis.push((unit(m, j, k) + unit(m, k, j)) * i_c);
        }
    }
    for j in 0..(m - 1) {
        basis.push((unit(m, j, j) - unit(m, j + 1, j + 1)) * i_c);
    }
    basis
}

fn u_basis(m: usize) -> Vec<CMat> {
    let mut basis = su_basis(m);
    basis.push(CMat::identity(m, m) * Complex64::new(0.0, 1.0));
    if m == 1 {
        // su(1) is trivial; u(1) = span(i)
        basis = vec![CMat::identity(1, 1) * Complex64::new(0.0, 1.0)];
    }
    basis
}

fn torus_basis(s: usize) -> Vec<CMat> {
    (0..s)
        .map(|j| unit(s, j, j) * Complex64::new(0.0, 1.0))
        .collect()
}

/// The three complex structures of H^r = R^{4r}: left multiplications by
/// i, j, k in the basis (1, i, j, k) per quaternionic coordinate.
pub fn quaternion_structures(r: usize) -> Vec<RMat> {
    let l_i = [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ];
    let l_j = [
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ];
    let l_k = [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ];
    [l_i, l_j, l_k]
        .iter()
        .map(|block| {
            let mut m = RMat::zeros(4 * r, 4 * r);
            for l in 0..r {
                for a in 0..4 {
                    for b in 0..4 {
                        m[(4 * l + a, 4 * l + b)] = block[a][b];
                    }
                }
            }
            m
        })
        .collect()
}

/// Basis of sp(r) inside so(4r): nullspace of A -> ([A,J], [A,K]) over the
/// so(4r) coefficient space. [A,L] = 0 follows from L = JK.
fn sp_basis(r: usize, structures: &[RMat]) -> Vec<CMat> {
    let n = 4 * r;
    let so = so_basis(n);
    let jj = &structures[0];
    let kk = &structures[1];
    let mut rows = RMat::zeros(2 * n * n, so.len());
    for (col, a) in so.iter().enumerate() {
        let ar = crate::linalg::real_part(a);
        let cj = &ar * jj - jj * &ar;
        let ck = &ar * kk - kk * &ar;
        for (idx, v) in cj.iter().chain(ck.iter()).enumerate() {
            rows[(idx, col)] = *v;
        }
    }
    let null = crate::linalg::nullspace(&rows);
    null.iter()
        .map(|coeffs| {
            let mut m = CMat::zeros(n, n);
            for (c, b) in coeffs.iter().zip(so.iter()) {
                m += b * Complex64::new(*c, 0.0);
            }
            m
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_dimension_formulas() {
        assert_eq!(GroupSpec::so(3).unwrap().algebra_dim(), 3);
        assert_eq!(GroupSpec::so(4).unwrap().algebra_dim(), 6);
        // dim SO(2m) = m(2m-1)
        assert_eq!(GroupSpec::so(6).unwrap().algebra_dim(), 15);
        assert_eq!(GroupSpec::su(2).unwrap().algebra_dim(), 3);
        assert_eq!(GroupSpec::su(3).unwrap().algebra_dim(), 8);
        assert_eq!(GroupSpec::unitary(2).unwrap().algebra_dim(), 4);
        assert_eq!(GroupSpec::sp(1).unwrap().algebra_dim(), 3);
        assert_eq!(GroupSpec::sp(2).unwrap().algebra_dim(), 10);
        assert_eq!(GroupSpec::torus(5).unwrap().algebra_dim(), 5);
    }

    #[test]
    fn basis_satisfies_constraints() {
        for spec in [
            GroupSpec::so(3).unwrap(),
            GroupSpec::su(3).unwrap(),
            GroupSpec::unitary(2).unwrap(),
            GroupSpec::sp(1).unwrap(),
            GroupSpec::torus(3).unwrap(),
        ] {
            assert_eq!(spec.raw_basis().len(), spec.algebra_dim());
            for b in spec.raw_basis() {
                assert!(
                    spec.algebra_residual(b) < 1e-12 * (1.0 + b.norm()),
                    "{spec} basis residual too large"
                );
            }
        }
    }

    #[test]
    fn basis_is_linearly_independent() {
        for spec in [
            GroupSpec::so(4).unwrap(),
            GroupSpec::su(3).unwrap(),
            GroupSpec::sp(2).unwrap(),
        ] {
            let vecs: Vec<_> = spec
                .raw_basis()
                .iter()
                .map(crate::linalg::vectorize_real)
                .collect();
            assert_eq!(crate::linalg::rank_of_rows(&vecs), spec.algebra_dim());
        }
    }

    #[test]
    fn quaternion_structure_identities() {
        let st = quaternion_structures(2);
        let (j, k, l) = (&st[0], &st[1], &st[2]);
        let id = RMat::identity(8, 8);
        assert!((j * j + &id).norm() < 1e-14);
        assert!((k * k + &id).norm() < 1e-14);
        assert!((l * l + &id).norm() < 1e-14);
        assert!((j * k - l).norm() < 1e-14, "JK = L");
        assert!((j * k + k * j).norm() < 1e-14, "J, K anticommute");
    }

    #[test]
    fn product_rt_is_not_a_matrix_group() {
        assert!(GroupSpec::new(Family::ProductRT, 2).is_err());
    }

    #[test]
    fn rejects_bad_algebra_element() {
        let spec = GroupSpec::so(3).unwrap();
        let bad = cmat_from_real(&RMat::identity(3, 3));
        assert!(AlgebraElement::new(&spec, bad).is_err());
    }
}
