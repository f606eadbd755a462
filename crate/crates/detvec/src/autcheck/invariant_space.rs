//! Equivariant polynomial vector field spaces.
//!
//! Invariance under a connected group is imposed infinitesimally: for
//! every algebra basis element A (acting on the realified representation
//! space), the field must satisfy DX(x) (A x) = A X(x) identically. On
//! polynomial fields that is finite linear algebra: the operator
//! X -> DX (Ax) - A X preserves the degree, so the nullspace is computed
//! one homogeneous degree at a time over the monomial basis in graded-lex
//! order.
//!
//! Disconnected groups (O(n)) add one linear condition per extra
//! component: equivariance under a diagonal reflection representative.

use crate::dsl::{self, Chart, VFieldExpr, E};
use crate::error::{Error, Result};
use crate::lie::Spec;
use crate::linalg::{nullspace, rank, RMat, RVec};

/// Hard cap on the coefficient space size.
const COEFF_GUARD: usize = 100_000;
/// Coefficient entries below this relative size are rounding noise from
/// the SVD and are dropped when building printable fields.
const COEFF_CLEAN: f64 = 1e-10;

/// The data equivariance is imposed against: an algebra (for the identity
/// component) plus diagonal +-1 representatives of any further components.
#[derive(Debug, Clone)]
pub struct EquivariancePresentation {
    pub label: String,
    pub real_dim: usize,
    pub algebra: Vec<RMat>,
    /// Diagonal reflection representatives (entries +-1) of non-identity
    /// components.
    pub reflections: Vec<Vec<f64>>,
}

impl EquivariancePresentation {
    pub fn from_spec(spec: &Spec) -> Self {
        EquivariancePresentation {
            label: spec.to_string(),
            real_dim: spec.real_dim(),
            algebra: spec.real_algebra_basis(),
            reflections: Vec::new(),
        }
    }

    /// The full orthogonal group O(n): so(n) plus one reflection.
    pub fn orthogonal(n: usize) -> Result<Self> {
        let so = crate::lie::GroupSpec::so(n)?;
        let mut refl = vec![1.0; n];
        refl[0] = -1.0;
        Ok(EquivariancePresentation {
            label: format!("O({n})"),
            real_dim: n,
            algebra: so.real_algebra_basis(),
            reflections: vec![refl],
        })
    }
}

#[derive(Debug, Clone)]
pub struct InvariantSpace {
    pub dimension: usize,
    pub basis: Vec<VFieldExpr>,
    /// Per-degree coefficient bases over the monomial-vector basis,
    /// used for space comparisons.
    pub coeff_basis: Vec<(usize, Vec<RVec>)>,
}

/// Exact-degree multi-indices in graded-lex order.
pub fn monomials(m: usize, degree: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; m];
    fn rec(m: usize, pos: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == m - 1 {
            current[pos] = remaining;
            out.push(current.clone());
            return;
        }
        for e in (0..=remaining).rev() {
            current[pos] = e;
            rec(m, pos + 1, remaining - e, current, out);
        }
    }
    if m == 0 {
        return out;
    }
    rec(m, 0, degree as u32, &mut current, &mut out);
    out
}

/// Basis of the polynomial fields of degree <= d invariant under the
/// spec's (connected) group.
pub fn invariant_field_space(spec: &Spec, max_degree: usize) -> Result<InvariantSpace> {
    invariant_field_space_of(&EquivariancePresentation::from_spec(spec), max_degree)
}

pub fn invariant_field_space_of(
    pres: &EquivariancePresentation,
    max_degree: usize,
) -> Result<InvariantSpace> {
    let m = pres.real_dim;
    let total_coeffs: usize = (0..=max_degree)
        .map(|l| m * monomials(m, l).len())
        .sum();
    if total_coeffs > COEFF_GUARD {
        return Err(Error::SystemTooLarge {
            size: total_coeffs,
            guard: COEFF_GUARD,
        });
    }

    let chart = Chart::euclidean(m);
    let mut basis_fields = Vec::new();
    let mut coeff_basis = Vec::new();
    for degree in 0..=max_degree {
        let monos = monomials(m, degree);
        let null = degree_nullspace(pres, &monos, m);
        for coeffs in &null {
            basis_fields.push(coeffs_to_field(&chart, coeffs, &monos, m)?);
        }
        if !null.is_empty() {
            coeff_basis.push((degree, null));
        }
    }
    Ok(InvariantSpace {
        dimension: basis_fields.len(),
        basis: basis_fields,
        coeff_basis,
    })
}

fn degree_nullspace(
    pres: &EquivariancePresentation,
    monos: &[Vec<u32>],
    m: usize,
) -> Vec<RVec> {
    let n_unknowns = m * monos.len();
    let mut table = std::collections::HashMap::new();
    for (idx, mo) in monos.iter().enumerate() {
        table.insert(mo.clone(), idx);
    }
    let n_blocks = pres.algebra.len() + pres.reflections.len();
    let mut mat = RMat::zeros(n_blocks * n_unknowns, n_unknowns);
    for (ai, a) in pres.algebra.iter().enumerate() {
        let row0 = ai * n_unknowns;
        for (mi, mono) in monos.iter().enumerate() {
            for comp in 0..m {
                let col = mi * m + comp;
                // grad(x^mono) . (A x), spread over shifted monomials
                for j in 0..m {
                    if mono[j] == 0 {
                        continue;
                    }
                    for l in 0..m {
                        let ajl = a[(j, l)];
                        if ajl == 0.0 {
                            continue;
                        }
                        let mut shifted = mono.clone();
                        shifted[j] -= 1;
                        shifted[l] += 1;
                        let ti = table[&shifted];
                        mat[(row0 + ti * m + comp, col)] += mono[j] as f64 * ajl;
                    }
                }
                // -(A e_comp) x^mono
                for j in 0..m {
                    let ajc = a[(j, comp)];
                    if ajc == 0.0 {
                        continue;
                    }
                    mat[(row0 + mi * m + j, col)] -= ajc;
                }
            }
        }
    }
    // reflection equivariance: rho X(rho x) = X(x); for diagonal rho the
    // monomial basis is preserved up to sign, one equation per unknown
    for (ri, refl) in pres.reflections.iter().enumerate() {
        let row0 = (pres.algebra.len() + ri) * n_unknowns;
        for (mi, mono) in monos.iter().enumerate() {
            let sign_mono: f64 = mono
                .iter()
                .zip(refl.iter())
                .map(|(&e, &r)| r.powi(e as i32))
                .product();
            for comp in 0..m {
                let col = mi * m + comp;
                let factor = refl[comp] * sign_mono;
                mat[(row0 + col, col)] = 1.0 - factor;
            }
        }
    }
    nullspace(&mat)
}

fn coeffs_to_field(
    chart: &Chart,
    coeffs: &RVec,
    monos: &[Vec<u32>],
    m: usize,
) -> Result<VFieldExpr> {
    let max_c = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let mut comps: Vec<E> = (0..m).map(|_| dsl::konst(0.0)).collect();
    for (mi, mono) in monos.iter().enumerate() {
        for comp in 0..m {
            let c = coeffs[mi * m + comp];
            if c.abs() <= COEFF_CLEAN * max_c {
                continue;
            }
            let mut term = dsl::konst(c);
            for (j, &e) in mono.iter().enumerate() {
                if e > 0 {
                    term = dsl::mul(term, dsl::pow(dsl::coord(j), e as i32));
                }
            }
            comps[comp] = dsl::add(comps[comp].clone(), term);
        }
    }
    VFieldExpr::new(*chart, comps)
}

/// Do the two groups have the same invariant polynomial fields up to the
/// cutoff degree? Decided by mutual containment rank tests on the
/// per-degree coefficient spaces.
pub fn compare_invariant_spaces(
    a: &EquivariancePresentation,
    b: &EquivariancePresentation,
    max_degree: usize,
) -> Result<bool> {
    if a.real_dim != b.real_dim {
        return Err(Error::DimensionMismatch {
            expected: a.real_dim,
            got: b.real_dim,
        });
    }
    let sa = invariant_field_space_of(a, max_degree)?;
    let sb = invariant_field_space_of(b, max_degree)?;
    for degree in 0..=max_degree {
        let empty: Vec<RVec> = Vec::new();
        let va = sa
            .coeff_basis
            .iter()
            .find(|(d, _)| *d == degree)
            .map(|(_, v)| v)
            .unwrap_or(&empty);
        let vb = sb
            .coeff_basis
            .iter()
            .find(|(d, _)| *d == degree)
            .map(|(_, v)| v)
            .unwrap_or(&empty);
        if va.len() != vb.len() {
            return Ok(false);
        }
        if va.is_empty() {
            continue;
        }
        let ra = rank(&rows_matrix(va));
        let rb = rank(&rows_matrix(vb));
        let mut joint = va.clone();
        joint.extend(vb.iter().cloned());
        let rj = rank(&rows_matrix(&joint));
        if !(ra == rb && rb == rj) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn rows_matrix(rows: &[RVec]) -> RMat {
    RMat::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::GroupSpec;

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(3, 2).len(), 6);
        assert_eq!(monomials(2, 5).len(), 6);
        assert_eq!(monomials(4, 0).len(), 1);
    }

    #[test]
    fn u1_linear_invariants_are_xi_and_y() {
        let spec = GroupSpec::unitary(1).unwrap();
        let space = invariant_field_space(&spec, 1).unwrap();
        assert_eq!(space.dimension, 2);
    }

    #[test]
    fn so3_cubic_invariants() {
        let spec = GroupSpec::so(3).unwrap();
        let space = invariant_field_space(&spec, 3).unwrap();
        // xi and |x|^2 xi
        assert_eq!(space.dimension, 2);
        for f in &space.basis {
            for p in [[0.5, -0.3, 1.0], [1.0, 2.0, -0.7]] {
                let v = f.evaluate(&p).unwrap();
                let cross = [
                    v[1] * p[2] - v[2] * p[1],
                    v[2] * p[0] - v[0] * p[2],
                    v[0] * p[1] - v[1] * p[0],
                ];
                for c in cross {
                    assert!(c.abs() < 1e-8, "invariant field must be radial");
                }
            }
        }
    }

    #[test]
    fn su2_linear_invariants_contain_xi_and_y() {
        let spec = GroupSpec::su(2).unwrap();
        let space = invariant_field_space(&spec, 1).unwrap();
        // SU(2) = Sp(1) on R^4: the commutant is the full quaternion algebra
        assert!(space.dimension >= 2);
        assert_eq!(space.dimension, 4);
    }

    #[test]
    fn sp1_vs_u2_spaces_differ() {
        let sp1 = EquivariancePresentation::from_spec(&GroupSpec::sp(1).unwrap());
        let u2 = EquivariancePresentation::from_spec(&GroupSpec::unitary(2).unwrap());
        assert!(!compare_invariant_spaces(&sp1, &u2, 1).unwrap());
    }

    #[test]
    fn so3_equals_o3_at_low_degree() {
        let so3 = EquivariancePresentation::from_spec(&GroupSpec::so(3).unwrap());
        let o3 = EquivariancePresentation::orthogonal(3).unwrap();
        assert!(compare_invariant_spaces(&so3, &o3, 3).unwrap());
    }
}
