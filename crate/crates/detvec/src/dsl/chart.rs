//! Chart descriptors for the supported coordinate domains.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// R^m, optionally with the origin removed from the domain.
    Euclidean { dim: usize, punctured: bool },
    /// R^k x T^s with coordinates x1..xk, th1..ths.
    ProductRT { k: usize, s: usize },
}

impl Chart {
    pub fn euclidean(dim: usize) -> Chart {
        Chart::Euclidean {
            dim,
            punctured: false,
        }
    }

    pub fn euclidean_punctured(dim: usize) -> Chart {
        Chart::Euclidean {
            dim,
            punctured: true,
        }
    }

    pub fn product_rt(k: usize, s: usize) -> Chart {
        Chart::ProductRT { k, s }
    }

    pub fn dim(&self) -> usize {
        match self {
            Chart::Euclidean { dim, .. } => *dim,
            Chart::ProductRT { k, s } => k + s,
        }
    }

    /// Number of Euclidean coordinates (all of them for a Euclidean chart,
    /// the first k for a product chart).
    pub fn x_dim(&self) -> usize {
        match self {
            Chart::Euclidean { dim, .. } => *dim,
            Chart::ProductRT { k, .. } => *k,
        }
    }

    pub fn theta_dim(&self) -> usize {
        match self {
            Chart::Euclidean { .. } => 0,
            Chart::ProductRT { s, .. } => *s,
        }
    }

    pub fn is_punctured(&self) -> bool {
        matches!(self, Chart::Euclidean { punctured: true, .. })
    }

    /// Same shape; the punctured flag only restricts the domain.
    pub fn compatible(&self, other: &Chart) -> bool {
        match (self, other) {
            (Chart::Euclidean { dim: a, .. }, Chart::Euclidean { dim: b, .. }) => a == b,
            (Chart::ProductRT { k: k1, s: s1 }, Chart::ProductRT { k: k2, s: s2 }) => {
                k1 == k2 && s1 == s2
            }
            _ => false,
        }
    }

    pub fn coord_name(&self, i: usize) -> String {
        let k = self.x_dim();
        if i < k {
            format!("x{}", i + 1)
        } else {
            format!("th{}", i - k + 1)
        }
    }

    /// Resolve a coordinate name to its index.
    pub fn coord_index(&self, name: &str) -> Option<usize> {
        let k = self.x_dim();
        if let Some(num) = name.strip_prefix("th") {
            let j: usize = num.parse().ok()?;
            if j >= 1 && j <= self.theta_dim() {
                return Some(k + j - 1);
            }
            return None;
        }
        if let Some(num) = name.strip_prefix('x') {
            let j: usize = num.parse().ok()?;
            if j >= 1 && j <= k {
                return Some(j - 1);
            }
        }
        None
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chart::Euclidean {
                dim,
                punctured: false,
            } => write!(f, "R^{dim}"),
            Chart::Euclidean {
                dim,
                punctured: true,
            } => write!(f, "R^{dim} minus 0"),
            Chart::ProductRT { k, s } => write!(f, "R^{k} x T^{s}"),
        }
    }
}
