//! Small dense linear algebra helpers shared across the crate.
//!
//! Everything at desk scale (matrices up to ~12x12, coefficient systems up
//! to a few thousand rows), so dense SVD is the workhorse for every rank
//! and nullspace decision.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Scale-free singular value cutoff used by every rank decision.
pub const RANK_TOL: f64 = 1e-9;

pub fn cmat_zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn cmat_identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn cmat_from_real(m: &RMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| Complex64::new(m[(i, j)], 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    RMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

pub fn imag_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.im * z.im).sum::<f64>().sqrt()
}

/// Matrix exponential. nalgebra's `exp` is a scaling-and-squaring Pade
/// scheme, accurate to ~1e-13 relative for the norms we use (<= 10).
pub fn expm(a: &CMat) -> CMat {
    a.exp()
}

/// Conjugate transpose.
pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// Flatten a complex matrix into a real coordinate vector (re/im pairs),
/// so that real-linear rank questions about sets of matrices become
/// ordinary rank computations.
pub fn vectorize_real(m: &CMat) -> RVec {
    let mut v = RVec::zeros(2 * m.nrows() * m.ncols());
    for (idx, z) in m.iter().enumerate() {
        v[2 * idx] = z.re;
        v[2 * idx + 1] = z.im;
    }
    v
}

/// Rank of the row span of `rows` with the scale-free cutoff.
pub fn rank_of_rows(rows: &[RVec]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let n = rows[0].len();
    let mat = RMat::from_fn(rows.len(), n, |i, j| rows[i][j]);
    rank(&mat)
}

pub fn rank(mat: &RMat) -> usize {
    if mat.nrows() == 0 || mat.ncols() == 0 {
        return 0;
    }
    let sv = mat.clone().singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * smax).count()
}

/// Orthonormal basis of the (right) nullspace of `mat`.
///
/// Wide matrices are padded with zero rows so the thin SVD still carries
/// every right singular vector.
pub fn nullspace(mat: &RMat) -> Vec<RVec> {
    let (m, n) = (mat.nrows(), mat.ncols());
    let padded = if m < n {
        let mut p = RMat::zeros(n, n);
        p.view_mut((0, 0), (m, n)).copy_from(mat);
        p
    } else {
        mat.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("svd requested v_t");
    let sv = &svd.singular_values;
    let smax = sv.max();
    let mut basis = Vec::new();
    for i in 0..v_t.nrows() {
        let s = if i < sv.len() { sv[i] } else { 0.0 };
        if smax == 0.0 || s <= RANK_TOL * smax {
            basis.push(v_t.row(i).transpose());
        }
    }
    basis
}

/// Real 2m x 2m matrix of a complex m x m matrix in interleaved
/// coordinates z_j = x_{2j-1} + i x_{2j}. Multiplication by i becomes the
/// block-diagonal rotation J.
pub fn realify_interleaved(c: &CMat) -> RMat {
    let m = c.nrows();
    let mut r = RMat::zeros(2 * m, 2 * m);
    for j in 0..m {
        for k in 0..m {
            let z = c[(j, k)];
            r[(2 * j, 2 * k)] = z.re;
            r[(2 * j, 2 * k + 1)] = -z.im;
            r[(2 * j + 1, 2 * k)] = z.im;
            r[(2 * j + 1, 2 * k + 1)] = z.re;
        }
    }
    r
}

/// Quaternion a + b i + c j + d k. Only what the symplectic sampler needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quat {
    pub const ZERO: Quat = Quat {
        a: 0.0,
        b: 0.0,
        c: 0.0,
        d: 0.0,
    };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Quat { a, b, c, d }
    }

    pub fn conj(self) -> Self {
        Quat::new(self.a, -self.b, -self.c, -self.d)
    }

    pub fn norm_sq(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn mul(self, o: Quat) -> Quat {
        Quat::new(
            self.a * o.a - self.b * o.b - self.c * o.c - self.d * o.d,
            self.a * o.b + self.b * o.a + self.c * o.d - self.d * o.c,
            self.a * o.c - self.b * o.d + self.c * o.a + self.d * o.b,
            self.a * o.d + self.b * o.c - self.c * o.b + self.d * o.a,
        )
    }

    pub fn add(self, o: Quat) -> Quat {
        Quat::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }

    pub fn sub(self, o: Quat) -> Quat {
        Quat::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn scale(self, s: f64) -> Quat {
        Quat::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// 4x4 real matrix of x -> x * q in the basis (1, i, j, k).
    ///
    /// Right multiplications commute with the left multiplications J, K, L,
    /// which is exactly the quaternion-linearity the symplectic group needs.
    pub fn right_mult_matrix(self) -> RMat {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        RMat::from_row_slice(
            4,
            4,
            &[
                a, -b, -c, -d, //
                b, a, d, -c, //
                c, -d, a, b, //
                d, c, -b, a,
            ],
        )
    }
}
