//! Jacobi-type dense factorizations.
//!
//! Cyclic two-sided Jacobi for symmetric eigenproblems and one-sided
//! (Hestenes) Jacobi for right singular vectors. Both keep small eigenvalues
//! and singular values accurate to a few ulps of the largest one, which the
//! rank decisions downstream rely on.

use crate::dense::{dot, norm, Mat};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 80;

/// Spectral decomposition `A = V diag(values) Vᵀ`, values sorted descending.
#[derive(Clone, Debug)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: Mat<T>,
}

/// Symmetric eigendecomposition by the cyclic Jacobi method.
///
/// Only the upper triangle is read; callers symmetrize first.
pub fn symmetric_eigen<T: Scalar>(a: &Mat<T>) -> SymEigen<T> {
    assert!(a.is_square(), "eigendecomposition of a non-square matrix");
    let n = a.nrows();
    let mut a = Mat::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { a[(j, i)] });
    let mut v = Mat::identity(n);
    let eps = T::epsilon();
    let two = T::one() + T::one();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // relative-accuracy threshold (Demmel & Veselic)
                if apq.abs() <= eps * (app * aqq).abs().sqrt() {
                    a[(p, q)] = T::zero();
                    a[(q, p)] = T::zero();
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (two * apq);
                let t = if theta.abs() > T::one() / eps {
                    T::one() / (two * theta)
                } else {
                    let t = T::one() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    if theta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let nkp = c * akp - s * akq;
                    let nkq = s * akp + c * akq;
                    a[(k, p)] = nkp;
                    a[(p, k)] = nkp;
                    a[(k, q)] = nkq;
                    a[(q, k)] = nkq;
                }
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = T::zero();
                a[(q, p)] = T::zero();

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
    order.sort_by(|&i, &j| a[(j, j)].partial_cmp(&a[(i, i)]).unwrap_or(std::cmp::Ordering::Equal));
    SymEigen {
        values: order.iter().map(|&i| a[(i, i)]).collect(),
        vectors: v.select_columns(&order),
    }
}

/// Singular values and right singular vectors of a rectangular matrix.
#[derive(Clone, Debug)]
pub struct RightSvd<T> {
    /// Singular values sorted descending; length equals the column count.
    pub values: Vec<T>,
    /// Right singular vectors as columns, matching `values`.
    pub vectors: Mat<T>,
}

/// One-sided Jacobi SVD: orthogonalizes the columns of `g` by plane
/// rotations accumulated into `V`. Column norms are the singular values.
pub fn right_svd<T: Scalar>(g: &Mat<T>) -> RightSvd<T> {
    let m = g.nrows();
    let n = g.ncols();
    let mut cols: Vec<Vec<T>> = (0..n).map(|j| g.column(j)).collect();
    let mut v = Mat::identity(n);
    let eps = T::epsilon();
    let two = T::one() + T::one();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == T::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (two * gamma);
                let t = if zeta.abs() > T::one() / eps {
                    T::one() / (two * zeta)
                } else {
                    let t = T::one() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                    if zeta < T::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let gp = cols[p][i];
                    let gq = cols[q][i];
                    cols[p][i] = c * gp - s * gq;
                    cols[q][i] = s * gp + c * gq;
                }
                for k in 0..n {
                    let vp = v[(k, p)];
                    let vq = v[(k, q)];
                    v[(k, p)] = c * vp - s * vq;
                    v[(k, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<T> = cols.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap_or(std::cmp::Ordering::Equal));
    RightSvd {
        values: order.iter().map(|&i| sigma[i]).collect(),
        vectors: v.select_columns(&order),
    }
}

/// Orthonormal basis of the span of `vectors` by Gram-Schmidt with column
/// pivoting. Vectors whose residual falls to `drop_tol * max_norm` or below
/// are discarded. Returns a `dim x r` matrix.
pub fn orthonormal_span<T: Scalar>(dim: usize, vectors: &[Vec<T>], drop_tol: T) -> Mat<T> {
    let mut work: Vec<Vec<T>> = vectors.to_vec();
    let max_norm = work.iter().map(|v| norm(v)).fold(T::zero(), T::max);
    let cutoff = drop_tol * max_norm;
    let mut basis: Vec<Vec<T>> = Vec::new();

    while !work.is_empty() && basis.len() < dim {
        let (best, best_norm) = work
            .iter()
            .enumerate()
            .map(|(i, v)| (i, norm(v)))
            .fold((0, T::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_norm <= cutoff || best_norm == T::zero() {
            break;
        }
        let mut q = work.swap_remove(best);
        // second pass restores orthogonality lost to cancellation
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &q);
                for (qi, &bi) in q.iter_mut().zip(b) {
                    *qi = *qi - c * bi;
                }
            }
        }
        let qn = norm(&q);
        if qn <= cutoff || qn == T::zero() {
            continue;
        }
        for qi in q.iter_mut() {
            *qi = *qi / qn;
        }
        for w in work.iter_mut() {
            let c = dot(&q, w);
            for (wi, &qi) in w.iter_mut().zip(&q) {
                *wi = *wi - c * qi;
            }
        }
        basis.push(q);
    }
    Mat::from_columns(dim, &basis)
}
