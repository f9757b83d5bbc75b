#![allow(dead_code)]

use ica_emk::linalg::householder_qr;
use ica_emk::rng::stream;
use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = stream(seed, 2000, 0);
    Array2::from_shape_fn((rows, cols), |_| rng.sample(StandardNormal))
}

/// Centered and whitened copy of `x`.
pub fn exactly_white(x: &Array2<f64>) -> Array2<f64> {
    let (z, _) = ica_emk::preprocess::center_and_whiten(x.view()).unwrap();
    z
}

pub fn orthogonal(n: usize, seed: u64) -> Array2<f64> {
    let (q, _) = householder_qr(gaussian_matrix(n, n, seed).view());
    q
}

/// Largest off-dominant |entry| / dominant |entry| over rows.
pub fn max_offdiag_ratio(g: &Array2<f64>) -> f64 {
    g.rows()
        .into_iter()
        .map(|r| {
            let mut a: Vec<f64> = r.iter().map(|v| v.abs()).collect();
            a.sort_by(|x, y| y.total_cmp(x));
            a[1] / a[0]
        })
        .fold(0.0, f64::max)
}

/// Nonzero-probability permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Frozen-multiplier surrogate cost as a function of row `m` only:
/// `1 − Σ λ_i α_i(w_m) − ln|det W|`, with `det` evaluated directly.
pub fn frozen_surrogate(
    w: &Array2<f64>,
    z: &Array2<f64>,
    m: usize,
    model: &ica_emk::MaxEntModel<f64>,
) -> f64 {
    let y: Vec<f64> = z.t().dot(&w.row(m)).to_vec();
    let alpha = ica_emk::emk_density::sample_averages(&y, &model.spec);
    let h = 1.0
        - model
            .lambda
            .iter()
            .zip(&alpha)
            .map(|(l, a)| l * a)
            .sum::<f64>();
    h - ica_emk::linalg::det(w.view()).abs().ln()
}

/// Central finite-difference gradient of [`frozen_surrogate`].
pub fn surrogate_fd_gradient(
    w: &Array2<f64>,
    z: &Array2<f64>,
    m: usize,
    model: &ica_emk::MaxEntModel<f64>,
) -> Vec<f64> {
    let n = w.ncols();
    let step = 1e-6;
    (0..n)
        .map(|j| {
            let mut up = w.clone();
            up[(m, j)] += step;
            let mut dn = w.clone();
            dn[(m, j)] -= step;
            (frozen_surrogate(&up, z, m, model) - frozen_surrogate(&dn, z, m, model)) / (2.0 * step)
        })
        .collect()
}
