//! Free-point criterion for SO(n) acting diagonally on (n-1)-tuples of
//! vectors in R^n: the point is free iff the vectors are linearly
//! independent. For n = 3 the pair of invariants (|v1|^2, <v1, v2>) maps
//! the unit sphere onto a closed disc whose interior is exactly the free
//! locus.

use crate::error::{Error, Result};
use crate::linalg::{rank, RMat};

/// Free-point test: `vectors` must be n-1 vectors in R^n, n >= 3.
pub fn is_free_point_e62(vectors: &[Vec<f64>]) -> Result<bool> {
    let count = vectors.len();
    let n = count + 1;
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "need n - 1 >= 2 vectors in R^n with n >= 3, got {count}"
        )));
    }
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: v.len(),
            });
        }
    }
    let stacked = RMat::from_fn(count, n, |i, j| vectors[i][j]);
    Ok(rank(&stacked) == count)
}

/// The invariant map F(v) = (<v1, v1>, <v1, v2>) for n = 3.
pub fn e62_invariants(v1: &[f64], v2: &[f64]) -> Result<(f64, f64)> {
    if v1.len() != 3 || v2.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: v1.len().max(v2.len()),
        });
    }
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    Ok((dot(v1, v1), dot(v1, v2)))
}

/// Interior-of-the-disc criterion x2^2 < x1 (1 - x1), equivalently
/// (x1 - 1/2)^2 + x2^2 < 1/4: the image of a free point of S^5.
pub fn e62_in_open_disc(x: (f64, f64)) -> bool {
    x.1 * x.1 < x.0 * (1.0 - x.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_pair_is_free_and_interior() {
        let inv_sqrt2 = 1.0 / std::f64::consts::SQRT_2;
        let v1 = vec![inv_sqrt2, 0.0, 0.0];
        let v2 = vec![0.0, inv_sqrt2, 0.0];
        assert!(is_free_point_e62(&[v1.clone(), v2.clone()]).unwrap());
        let f = e62_invariants(&v1, &v2).unwrap();
        assert!((f.0 - 0.5).abs() < 1e-15 && f.1.abs() < 1e-15);
        assert!(e62_in_open_disc(f));
    }

    #[test]
    fn repeated_vector_is_not_free() {
        let v1 = vec![0.7, 0.1, 0.0];
        assert!(!is_free_point_e62(&[v1.clone(), v1.clone()]).unwrap());
        let f = e62_invariants(&v1, &v1).unwrap();
        assert!(!e62_in_open_disc(f));
    }

    #[test]
    fn n4_triple_is_free() {
        let s = 1.0 / 3.0f64.sqrt();
        let vs = vec![
            vec![s, 0.0, 0.0, 0.0],
            vec![0.0, s, 0.0, 0.0],
            vec![0.0, 0.0, s, 0.0],
        ];
        assert!(is_free_point_e62(&vs).unwrap());
    }

    #[test]
    fn wrong_count_is_rejected() {
        assert!(is_free_point_e62(&[vec![1.0, 0.0, 0.0]]).is_err());
    }
}
