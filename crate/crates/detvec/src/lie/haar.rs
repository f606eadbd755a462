//! Haar sampling for the supported families.
//!
//! The construction is the standard one: QR of a Ginibre matrix with the
//! triangular factor's diagonal normalized to be positive (real case),
//! unit-phase (complex case) or positive real (quaternionic case). SO(n)
//! is obtained from O(n) by reflecting one column of the det = -1 sheet,
//! SU(m) from U(m) by a determinant phase correction; both corrections
//! commute with left translations by the subgroup, so the pushforward
//! measure is again Haar.

use super::{Family, GroupElement, Spec};
use crate::error::{Error, Result};
use crate::linalg::{CMat, Quat, RMat};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng_for_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic per-task rng: same seed, distinct stream per index.
pub fn rng_for_task(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_matrix<R: Rng>(n: usize, m: usize, rng: &mut R) -> RMat {
    RMat::from_fn(n, m, |_, _| rng.sample(StandardNormal))
}

fn complex_gaussian_matrix<R: Rng>(n: usize, rng: &mut R) -> CMat {
    CMat::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar sample of O(n).
pub fn haar_orthogonal<R: Rng>(n: usize, rng: &mut R) -> RMat {
    let a = gaussian_matrix(n, n, rng);
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Haar sample of U(n) as a complex matrix.
pub fn haar_unitary_matrix<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let a = complex_gaussian_matrix(n, rng);
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar sample of the quaternionic unitary group as an r x r quaternion
/// matrix Q with Q* Q = I, via Gram-Schmidt over H on a quaternionic
/// Ginibre matrix with positive real normalizers.
fn haar_quaternion_unitary<R: Rng>(r: usize, rng: &mut R) -> Vec<Vec<Quat>> {
    // columns[j][i] = entry (i, j)
    let mut cols: Vec<Vec<Quat>> = (0..r)
        .map(|_| {
            (0..r)
                .map(|_| {
                    Quat::new(
                        rng.sample(StandardNormal),
                        rng.sample(StandardNormal),
                        rng.sample(StandardNormal),
                        rng.sample(StandardNormal),
                    )
                })
                .collect()
        })
        .collect();
    for j in 0..r {
        for b in 0..j {
            // c = <q_b, a_j> = sum conj(q_b[i]) a_j[i]
            let mut c = Quat::ZERO;
            for i in 0..r {
                c = c.add(cols[b][i].conj().mul(cols[j][i]));
            }
            for i in 0..r {
                let sub = cols[b][i].mul(c);
                cols[j][i] = cols[j][i].sub(sub);
            }
        }
        let norm = cols[j]
            .iter()
            .map(|q| q.norm_sq())
            .sum::<f64>()
            .sqrt();
        for i in 0..r {
            cols[j][i] = cols[j][i].scale(1.0 / norm);
        }
    }
    cols
}

/// Real 4r x 4r matrix of x -> x B for a quaternion matrix B given by
/// columns; block (i, j) is the right multiplication by B[j][i].
fn quaternion_to_real(cols: &[Vec<Quat>]) -> RMat {
    let r = cols.len();
    let mut m = RMat::zeros(4 * r, 4 * r);
    for i in 0..r {
        for j in 0..r {
            // T(x)_i = sum_j x_j B_{ji}; B_{ji} = cols[i][j]
            let block = cols[i][j].right_mult_matrix();
            for a in 0..4 {
                for b in 0..4 {
                    m[(4 * i + a, 4 * j + b)] = block[(a, b)];
                }
            }
        }
    }
    m
}

/// Haar sample of the spec's group, deterministic given the seed.
pub fn haar_sample(spec: &Spec, seed: u64) -> Result<GroupElement> {
    let mut rng = rng_for_seed(seed);
    haar_sample_with(spec, &mut rng)
}

pub fn haar_sample_with<R: Rng>(spec: &Spec, rng: &mut R) -> Result<GroupElement> {
    let n = spec.matrix_dim();
    let matrix: CMat = match spec.family() {
        Family::SO => {
            let mut q = haar_orthogonal(n, rng);
            let det = q.determinant();
            if det < 0.0 {
                for i in 0..n {
                    q[(i, 0)] = -q[(i, 0)];
                }
            }
            crate::linalg::cmat_from_real(&q)
        }
        Family::U => haar_unitary_matrix(n, rng),
        Family::SU => {
            let q = haar_unitary_matrix(n, rng);
            let det = q.determinant();
            // principal m-th root of the determinant phase
            let phase = det.arg();
            let w = Complex64::from_polar(1.0, -phase / n as f64);
            q * w
        }
        Family::Sp => {
            let r = spec.param();
            let cols = haar_quaternion_unitary(r, rng);
            crate::linalg::cmat_from_real(&quaternion_to_real(&cols))
        }
        Family::Torus => CMat::from_fn(n, n, |i, j| {
            if i == j {
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(1.0, theta)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
        Family::ProductRT => {
            return Err(Error::UnsupportedFamily(
                "cannot Haar-sample a ProductRT chart tag".into(),
            ))
        }
    };
    GroupElement::new(spec, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::GroupSpec;

    #[test]
    fn so3_sample_is_member() {
        let spec = GroupSpec::so(3).unwrap();
        let g = haar_sample(&spec, 1).unwrap();
        assert!(g.membership_residual() < 1e-12);
    }

    #[test]
    fn samples_are_deterministic() {
        let spec = GroupSpec::unitary(2).unwrap();
        let a = haar_sample(&spec, 7).unwrap();
        let b = haar_sample(&spec, 7).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        let c = haar_sample(&spec, 8).unwrap();
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn torus_sample_is_diagonal_phases() {
        let spec = GroupSpec::torus(2).unwrap();
        let g = haar_sample(&spec, 3).unwrap();
        let m = g.matrix();
        assert!(m[(0, 1)].norm() == 0.0 && m[(1, 0)].norm() == 0.0);
        assert!((m[(0, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((m[(1, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sp_sample_commutes_with_structures() {
        let spec = GroupSpec::sp(2).unwrap();
        let g = haar_sample(&spec, 5).unwrap();
        assert!(
            g.membership_residual() < 1e-12,
            "residual {}",
            g.membership_residual()
        );
    }

    #[test]
    fn su_sample_has_unit_determinant() {
        let spec = GroupSpec::su(3).unwrap();
        let g = haar_sample(&spec, 11).unwrap();
        let det = g.matrix().determinant();
        assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn distinct_streams_give_distinct_samples() {
        let spec = GroupSpec::so(4).unwrap();
        let mut r0 = rng_for_task(9, 0);
        let mut r1 = rng_for_task(9, 1);
        let a = haar_sample_with(&spec, &mut r0).unwrap();
        let b = haar_sample_with(&spec, &mut r1).unwrap();
        assert_ne!(a.matrix(), b.matrix());
    }
}
