//! Integer relation search for torus frequency vectors.
//!
//! A couple of torus algebra elements generates a dense subgroup iff no
//! nonzero integer vector annihilates both frequency vectors. Density is
//! decided by (i) full real span, or (ii) exhaustive search for a relation
//! over a bounded set of integer vectors. Failure to find a relation never
//! proves irrationality, which is why callers expose a third verdict.

use crate::linalg::{rank_of_rows, RMat, RVec};

/// Total enumeration budget; a search with one free coordinate scans
/// integers up to 1e6 as documented, higher-codimension searches shrink
/// the per-coordinate bound to keep the same budget.
pub const RELATION_SEARCH_BUDGET: f64 = 1e6;

const RELATION_TOL: f64 = 1e-9;

/// Finds a nonzero integer vector orthogonal to every row of `span`,
/// searching free coordinates up to the budget. Returns `None` when the
/// span is full or no relation exists within the bound.
pub fn integer_relation(span: &[RVec]) -> Option<Vec<i64>> {
    let s = span.first()?.len();
    let rows: Vec<RVec> = span
        .iter()
        .filter(|v| v.norm() > 1e-14)
        .cloned()
        .collect();
    if rows.is_empty() {
        // zero span: any lattice vector is a relation
        let mut n = vec![0i64; s];
        n[0] = 1;
        return Some(n);
    }
    let d = rank_of_rows(&rows);
    if d >= s {
        return None;
    }

    // Orthonormalize the span so the pivot solve is well conditioned.
    let basis = orthonormal_rows(&rows, d);

    // Pivot columns: greedy max-volume choice on the d x s basis matrix.
    let pivots = pivot_columns(&basis, s, d);
    let free: Vec<usize> = (0..s).filter(|c| !pivots.contains(c)).collect();

    let m_pivot = RMat::from_fn(d, d, |i, j| basis[i][pivots[j]]);
    let lu = m_pivot.lu();

    let free_bound = (RELATION_SEARCH_BUDGET.powf(1.0 / free.len() as f64)).floor() as i64;
    let free_bound = free_bound.max(1);

    let mut counters = vec![0i64; free.len()];
    loop {
        if !next_box_point(&mut counters, free_bound) {
            return None;
        }
        // right-hand side: -M_free * n_free
        let rhs = RVec::from_fn(d, |i, _| {
            -free
                .iter()
                .zip(counters.iter())
                .map(|(&c, &n)| basis[i][c] * n as f64)
                .sum::<f64>()
        });
        let Some(sol) = lu.solve(&rhs) else { continue };
        let mut candidate = vec![0i64; s];
        for (idx, &c) in free.iter().enumerate() {
            candidate[c] = counters[idx];
        }
        let mut ok = true;
        for (idx, &c) in pivots.iter().enumerate() {
            let r = sol[idx].round();
            if (sol[idx] - r).abs() > 1e-6 || r.abs() > 1e12 {
                ok = false;
                break;
            }
            candidate[c] = r as i64;
        }
        if !ok {
            continue;
        }
        if candidate.iter().all(|&x| x == 0) {
            continue;
        }
        if verifies_relation(&candidate, &rows) {
            return Some(candidate);
        }
    }
}

/// Dimension of the closure in T^s of the subgroup generated by `span`:
/// s minus the number of independent integer relations. Found relations
/// are peeled off by restricting the search to their orthogonal lattice
/// directions, which at desk scale (s <= 4) is done by re-searching with
/// the relation adjoined to the span of forbidden directions.
pub fn rational_rank(span: &[RVec]) -> usize {
    let s = match span.first() {
        Some(v) => v.len(),
        None => return 0,
    };
    let real_rank = rank_of_rows(
        &span
            .iter()
            .filter(|v| v.norm() > 1e-14)
            .cloned()
            .collect::<Vec<_>>(),
    );
    if real_rank == 0 {
        return 0;
    }
    if real_rank == s {
        return s;
    }
    // Count independent relations by adding each found relation to the
    // constraint span (a relation orthogonal to previous relations and to
    // the original span is independent of them).
    let mut constraints: Vec<RVec> = span.to_vec();
    let mut relations = 0usize;
    while let Some(n) = integer_relation(&constraints) {
        relations += 1;
        constraints.push(RVec::from_iterator(s, n.iter().map(|&x| x as f64)));
        if relations >= s - real_rank {
            break;
        }
    }
    s - relations
}

fn verifies_relation(n: &[i64], rows: &[RVec]) -> bool {
    let nn = (n.iter().map(|&x| (x * x) as f64).sum::<f64>()).sqrt();
    rows.iter().all(|v| {
        let dot: f64 = n.iter().zip(v.iter()).map(|(&a, &b)| a as f64 * b).sum();
        dot.abs() <= RELATION_TOL * nn * v.norm().max(1.0)
    })
}

fn orthonormal_rows(rows: &[RVec], d: usize) -> Vec<RVec> {
    let mut basis: Vec<RVec> = Vec::new();
    for r in rows {
        let mut v = r.clone();
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let n = v.norm();
        if n > 1e-12 * r.norm().max(1.0) {
            basis.push(v / n);
        }
        if basis.len() == d {
            break;
        }
    }
    basis
}

fn pivot_columns(basis: &[RVec], s: usize, d: usize) -> Vec<usize> {
    // Greedy column selection: repeatedly take the column with the largest
    // residual norm after projecting out the chosen ones.
    let mut cols: Vec<RVec> = (0..s)
        .map(|c| RVec::from_fn(d, |i, _| basis[i][c]))
        .collect();
    let mut chosen = Vec::new();
    for _ in 0..d {
        let (best, _) = cols
            .iter()
            .enumerate()
            .filter(|(c, _)| !chosen.contains(c))
            .map(|(c, v)| (c, v.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least d independent columns");
        chosen.push(best);
        let pivot = cols[best].clone();
        let pn = pivot.norm();
        if pn > 0.0 {
            let unit = pivot / pn;
            for (c, v) in cols.iter_mut().enumerate() {
                if !chosen.contains(&c) {
                    let proj = unit.dot(v);
                    *v -= &unit * proj;
                }
            }
        }
    }
    chosen
}

/// Iterates over the nonzero points of [-b, b]^k in a deterministic order,
/// by increasing sup-norm shells.
fn next_box_point(state: &mut [i64], bound: i64) -> bool {
    loop {
        // odometer increment in [-bound, bound]
        let mut i = 0;
        loop {
            if i == state.len() {
                return false;
            }
            if state[i] < bound {
                state[i] += 1;
                break;
            }
            state[i] = -bound;
            i += 1;
        }
        if state.iter().any(|&x| x != 0) {
            return true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> RVec {
        RVec::from_row_slice(x)
    }

    #[test]
    fn finds_rational_relation() {
        let rel = integer_relation(&[v(&[1.0, 2.0])]).expect("relation exists");
        // n . (1, 2) = 0 => n proportional to (2, -1)
        assert_eq!(rel[0] * 1 + rel[1] * 2, 0);
    }

    #[test]
    fn no_relation_for_sqrt2() {
        assert!(integer_relation(&[v(&[1.0, std::f64::consts::SQRT_2])]).is_none());
    }

    #[test]
    fn full_span_has_no_relation() {
        assert!(integer_relation(&[v(&[1.0, 0.0]), v(&[0.0, 7.0])]).is_none());
    }

    #[test]
    fn three_dim_relation() {
        // (1, sqrt2, 1 + sqrt2) has the relation (1, 1, -1)
        let s2 = std::f64::consts::SQRT_2;
        let rel = integer_relation(&[v(&[1.0, s2, 1.0 + s2])]).expect("relation");
        let dot = rel[0] as f64 + rel[1] as f64 * s2 + rel[2] as f64 * (1.0 + s2);
        assert!(dot.abs() < 1e-8);
    }

    #[test]
    fn rational_rank_examples() {
        let s2 = std::f64::consts::SQRT_2;
        assert_eq!(rational_rank(&[v(&[1.0, s2])]), 2);
        assert_eq!(rational_rank(&[v(&[1.0, 2.0])]), 1);
        assert_eq!(rational_rank(&[v(&[0.0, 0.0])]), 0);
        assert_eq!(rational_rank(&[v(&[1.0, s2, 1.0 + s2])]), 2);
    }
}
