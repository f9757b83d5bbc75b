//! Hungarian method for the square linear assignment problem.

use ndarray::ArrayView2;

use crate::Scalar;

/// Minimum-cost assignment; `result[row] = column`.
///
/// Shortest augmenting path formulation with row/column potentials, O(n³).
/// Among equal reduced costs the lowest column index wins.
pub fn min_cost_assignment<T: Scalar>(cost: ArrayView2<'_, T>) -> Vec<usize> {
    let n = cost.nrows();
    assert_eq!(n, cost.ncols(), "assignment needs a square cost matrix");
    if n == 0 {
        return Vec::new();
    }
    let inf = T::infinity();
    // 1-based with column 0 as the virtual source
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for row in 1..=n {
        owner[0] = row;
        let mut col0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[col0] = true;
            let r0 = owner[col0];
            let mut delta = inf;
            let mut col1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(r0 - 1, j - 1)] - u[r0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = col0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    col1 = j;
                }
            }
            if col1 == 0 {
                // only reachable with non-finite costs; fall back to the first free column
                col1 = (1..=n).find(|&j| !used[j]).expect("free column");
                delta = T::zero();
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let prev = way[col0];
            owner[col0] = owner[prev];
            col0 = prev;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut result = vec![0usize; n];
    for j in 1..=n {
        if owner[j] > 0 {
            result[owner[j] - 1] = j - 1;
        }
    }
    result
}

/// Maximum-weight assignment; `result[row] = column`.
pub fn max_weight_assignment<T: Scalar>(weight: ArrayView2<'_, T>) -> Vec<usize> {
    let top = weight.iter().copied().fold(T::neg_infinity(), T::max);
    let cost = weight.mapv(|w| top - w);
    min_cost_assignment(cost.view())
}
