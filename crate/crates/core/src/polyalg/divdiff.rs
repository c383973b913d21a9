use std::ops::{Div, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Triangular table of divided differences over an ordered node list.
///
/// `get(i, j)` is `f[x_i, ..., x_j]` (inclusive, `i <= j`).
#[derive(Debug, Clone)]
pub struct DividedTable<T, V> {
    nodes: Vec<Complex<T>>,
    levels: Vec<Vec<V>>,
}

impl<T: Real, V> DividedTable<T, V> {
    pub fn nodes(&self) -> &[Complex<T>] {
        &self.nodes
    }

    pub fn get(&self, i: usize, j: usize) -> &V {
        assert!(i <= j && j < self.nodes.len());
        &self.levels[j - i][i]
    }

    /// `f[x_0, ..., x_{k-1}]` for `k >= 1`.
    pub fn prefix(&self, k: usize) -> &V {
        self.get(0, k - 1)
    }

    /// `f[x_{i}, ..., x_last]`.
    pub fn suffix(&self, i: usize) -> &V {
        self.get(i, self.nodes.len() - 1)
    }

    /// Full-order divided difference.
    pub fn top(&self) -> &V {
        self.prefix(self.nodes.len())
    }
}

/// Rejects node lists with two nodes closer than `tol` relative to
/// `max(1, max |x|)`.
pub fn check_separation<T: Real>(nodes: &[Complex<T>], tol: T) -> Result<()> {
    let scale = nodes.iter().fold(T::one(), |m, z| m.max(z.norm()));
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if (nodes[i] - nodes[j]).norm() <= tol * scale {
                return Err(Error::DegenerateRoots(i, j));
            }
        }
    }
    Ok(())
}

/// Builds the divided-difference table of `values` (the function sampled at
/// `nodes`) by the standard recursion. Works for any value type closed
/// under subtraction and division by a complex scalar (scalars, matrices).
pub fn divided_differences<T, V>(nodes: &[Complex<T>], values: Vec<V>, tol_sep: T) -> Result<DividedTable<T, V>>
where
    T: Real,
    V: Clone + Sub<Output = V> + Div<Complex<T>, Output = V>,
{
    assert_eq!(nodes.len(), values.len(), "one value per node");
    assert!(!nodes.is_empty(), "at least one node");
    check_separation(nodes, tol_sep)?;
    let n = nodes.len();
    let mut levels = Vec::with_capacity(n);
    levels.push(values);
    for k in 1..n {
        let prev = &levels[k - 1];
        let next: Vec<V> =
            (0..n - k).map(|i| (prev[i + 1].clone() - prev[i].clone()) / (nodes[i + k] - nodes[i])).collect();
        levels.push(next);
    }
    Ok(DividedTable { nodes: nodes.to_vec(), levels })
}

/// Full-order divided difference of `f` over `nodes`.
pub fn divided_difference<T, V, F>(nodes: &[Complex<T>], f: F, tol_sep: T) -> Result<V>
where
    T: Real,
    V: Clone + Sub<Output = V> + Div<Complex<T>, Output = V>,
    F: Fn(Complex<T>) -> V,
{
    let values = nodes.iter().map(|&x| f(x)).collect();
    Ok(divided_differences(nodes, values, tol_sep)?.top().clone())
}
