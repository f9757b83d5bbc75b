//! Small dense linear algebra, generic over [`Scalar`].
//!
//! Matrices here are tiny (N ≤ a few hundred, maxent Jacobians ≤ 9×9), so
//! plain Jacobi / Householder / LU routines are enough.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

use crate::Scalar;

/// Eigendecomposition of a symmetric matrix, eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    pub values: Array1<T>,
    /// Eigenvectors as columns, matching `values`.
    pub vectors: Array2<T>,
}

/// Cyclic Jacobi rotation method.
pub fn sym_eigen<T: Scalar>(a: ArrayView2<'_, T>) -> SymEigen<T> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "sym_eigen needs a square matrix");
    let mut m = a.to_owned();
    let mut v = Array2::<T>::eye(n);
    let eps = T::epsilon();
    // couplings this small relative to their diagonal pair are left alone
    let negligible = T::lit(1e-13).max(T::lit(64.0) * eps);

    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..n {
            diag += m[(i, i)] * m[(i, i)];
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off <= eps * eps * diag || off == T::zero() {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                if apq.abs() <= negligible * (app * aqq).abs().sqrt() {
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(j, j)]
            .partial_cmp(&m[(i, i)])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = Array1::from_iter(order.iter().map(|&i| m[(i, i)]));
    let mut vectors = Array2::<T>::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&v.column(src));
    }
    SymEigen { values, vectors }
}

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Array2<T>,
    perm: Vec<usize>,
    sign: T,
    singular: bool,
}

impl<T: Scalar> Lu<T> {
    pub fn new(a: ArrayView2<'_, T>) -> Self {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let mut lu = a.to_owned();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[(k, k)].abs();
            for i in (k + 1)..n {
                let v = lu[(i, k)].abs();
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            if best == T::zero() {
                singular = true;
                continue;
            }
            if piv != k {
                for j in 0..n {
                    lu.swap((k, j), (piv, j));
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != T::zero() {
                    for j in (k + 1)..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= f * u;
                    }
                }
            }
        }
        Lu {
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub fn det(&self) -> T {
        if self.singular {
            return T::zero();
        }
        let mut d = self.sign;
        for i in 0..self.lu.nrows() {
            d *= self.lu[(i, i)];
        }
        d
    }

    /// `ln|det|`, robust against under/overflow of the plain product.
    pub fn ln_abs_det(&self) -> T {
        if self.singular {
            return T::neg_infinity();
        }
        (0..self.lu.nrows())
            .map(|i| self.lu[(i, i)].abs().ln())
            .sum()
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn solve(&self, b: ArrayView1<'_, T>) -> Option<Array1<T>> {
        if self.singular {
            return None;
        }
        let n = self.lu.nrows();
        let mut x = Array1::from_iter(self.perm.iter().map(|&p| b[p]));
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Array2<T>> {
        let n = self.lu.nrows();
        let mut inv = Array2::<T>::zeros((n, n));
        for j in 0..n {
            let mut e = Array1::<T>::zeros(n);
            e[j] = T::one();
            inv.column_mut(j).assign(&self.solve(e.view())?);
        }
        Some(inv)
    }
}

pub fn det<T: Scalar>(a: ArrayView2<'_, T>) -> T {
    Lu::new(a).det()
}

/// Full Householder QR of an `m × k` matrix (`m ≥ k`): returns `(Q, R)` with
/// `Q` orthogonal `m × m` and `R` upper-triangular `k × k`.
pub fn householder_qr<T: Scalar>(a: ArrayView2<'_, T>) -> (Array2<T>, Array2<T>) {
    let (m, k) = a.dim();
    assert!(m >= k, "householder_qr needs rows >= cols");
    let mut r = a.to_owned();
    let mut q = Array2::<T>::eye(m);
    let two = T::lit(2.0);
    for j in 0..k {
        let mut norm = T::zero();
        for i in j..m {
            norm += r[(i, j)] * r[(i, j)];
        }
        let norm = norm.sqrt();
        if norm == T::zero() {
            continue;
        }
        let alpha = if r[(j, j)] > T::zero() { -norm } else { norm };
        let mut v = vec![T::zero(); m];
        for i in j..m {
            v[i] = r[(i, j)];
        }
        v[j] -= alpha;
        let vnorm2: T = v[j..].iter().map(|&x| x * x).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        for c in 0..k {
            let dot: T = (j..m).map(|i| v[i] * r[(i, c)]).sum();
            let f = two * dot / vnorm2;
            for i in j..m {
                r[(i, c)] -= f * v[i];
            }
        }
        // Q ← Q·H, accumulating the product of reflectors.
        for row in 0..m {
            let dot: T = (j..m).map(|i| q[(row, i)] * v[i]).sum();
            let f = two * dot / vnorm2;
            for i in j..m {
                q[(row, i)] -= f * v[i];
            }
        }
    }
    let r_top = r.slice(ndarray::s![0..k, ..]).to_owned();
    (q, r_top)
}

/// Singular values of an arbitrary matrix, descending.
pub fn singular_values<T: Scalar>(a: ArrayView2<'_, T>) -> Array1<T> {
    let gram = if a.nrows() <= a.ncols() {
        a.dot(&a.t())
    } else {
        a.t().dot(&a)
    };
    sym_eigen(gram.view())
        .values
        .mapv(|v| v.max(T::zero()).sqrt())
}

/// 2-norm condition number; `inf` when singular.
pub fn condition_number<T: Scalar>(a: ArrayView2<'_, T>) -> T {
    let s = singular_values(a);
    let max = s[0];
    let min = s[s.len() - 1];
    if min <= T::zero() {
        T::infinity()
    } else {
        max / min
    }
}

/// `(A)^{-1/2}` for a symmetric positive definite matrix.
pub fn inv_sqrt_spd<T: Scalar>(a: ArrayView2<'_, T>) -> Option<Array2<T>> {
    let eig = sym_eigen(a);
    if eig.values.iter().any(|&v| v <= T::zero()) {
        return None;
    }
    let d = eig.values.mapv(|v| T::one() / v.sqrt());
    let scaled = &eig.vectors * &d;
    Some(scaled.dot(&eig.vectors.t()))
}
