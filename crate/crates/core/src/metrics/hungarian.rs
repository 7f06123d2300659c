//! Maximum-weight one-to-one assignment (Kuhn–Munkres with potentials).

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Neg, Sub};

/// Weight types the solver can run on: exact integers or floats.
pub trait Weight: Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {
    const ZERO: Self;
    const INFINITY: Self;
}

impl Weight for i64 {
    const ZERO: Self = 0;
    const INFINITY: Self = i64::MAX / 4;
}

impl Weight for f64 {
    const ZERO: Self = 0.0;
    const INFINITY: Self = f64::INFINITY;
}

/// Assignment maximizing the total weight of `weights` (`rows × cols`,
/// row-major). Every row is matched when `rows ≤ cols` and every column
/// otherwise. Returns `(row, col)` pairs sorted by row.
pub fn max_weight_assignment<W: Weight>(weights: &[W], rows: usize, cols: usize) -> Vec<(usize, usize)> {
    assert_eq!(weights.len(), rows * cols, "weight matrix shape");
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    if rows > cols {
        let mut t = vec![W::ZERO; rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                t[c * rows + r] = weights[r * cols + c];
            }
        }
        let mut out: Vec<(usize, usize)> = max_weight_assignment(&t, cols, rows).into_iter().map(|(c, r)| (r, c)).collect();
        out.sort_unstable();
        return out;
    }

    // Minimize the negated weights; arrays are 1-based with slot 0 as the
    // virtual column.
    let (n, m) = (rows, cols);
    let cost = |i: usize, j: usize| -weights[(i - 1) * cols + (j - 1)];
    let mut u = vec![W::ZERO; n + 1];
    let mut v = vec![W::ZERO; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![W::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = W::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out: Vec<(usize, usize)> = (1..=m).filter(|&j| p[j] != 0).map(|j| (p[j] - 1, j - 1)).collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_integer_instance() {
        let w = [7i64, 53, 183, 439, 497, 383, 563, 79, 973, 287, 63, 343, 169, 583, 627, 343];
        let a = max_weight_assignment(&w, 4, 4);
        let total: i64 = a.iter().map(|&(r, c)| w[r * 4 + c]).sum();
        // 439 + 563 + 973 + 583, checked by enumerating all 24 permutations
        assert_eq!(total, 2558);
        assert_eq!(a, vec![(0, 3), (1, 2), (2, 0), (3, 1)]);
    }

    #[test]
    fn rectangular_both_ways() {
        let w = [1.0, 5.0, 2.0, 4.0, 3.0, 0.0];
        let a = max_weight_assignment(&w, 2, 3);
        assert_eq!(a, vec![(0, 1), (1, 0)]);
        let t = [1.0, 4.0, 5.0, 3.0, 2.0, 0.0];
        let b = max_weight_assignment(&t, 3, 2);
        assert_eq!(b, vec![(0, 1), (1, 0)]);
    }
}
