//! Symmetric and positive semidefinite matrix algebra.
//!
//! Every downstream computation goes through [`PsdOperator`], which carries
//! a cached spectral decomposition, so square roots, pseudoinverses and
//! support projections are all spectral functions of the same eigenbasis.

use crate::dense::{norm, Mat};
use crate::eigen::{orthonormal_span, symmetric_eigen};
use crate::error::{check_dim, Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// Default relative tolerance below zero at which eigenvalues are clipped.
pub const DEFAULT_CLIP_TOL: f64 = 1e-10;
/// Default relative rank threshold for pseudoinverses, kernels and supports.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Tolerance for projection idempotence and spectrum checks.
pub const PROJECTION_TOL: f64 = 1e-10;
/// Relative cutoff used when orthonormalizing spanning sets.
pub const SPAN_DROP_TOL: f64 = 1e-12;

/// Dense real symmetric matrix. Exactly symmetric and finite.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix<T> {
    m: Mat<T>,
}

impl<T: Scalar> SymmetricMatrix<T> {
    /// Validates finiteness and squareness, then symmetrizes.
    pub fn new(m: Mat<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if let Some((row, col)) = m.first_non_finite() {
            return Err(Error::NonFinite { row, col });
        }
        Ok(Self { m: m.symmetrized() })
    }

    pub fn from_row_major(dim: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        Self::new(Mat::from_row_major(dim, dim, entries))
    }

    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.as_ref().len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: bad.as_ref().len() });
        }
        Self::new(Mat::from_rows(rows))
    }

    pub fn zeros(dim: usize) -> Self {
        Self { m: Mat::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: Mat::identity(dim) }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        Self { m: Mat::from_diagonal(diag) }
    }

    /// Symmetric part of a product or other nearly-symmetric result.
    pub(crate) fn from_nearly_symmetric(m: Mat<T>) -> Self {
        debug_assert!(m.is_square());
        Self { m: m.symmetrized() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    #[inline]
    pub fn as_mat(&self) -> &Mat<T> {
        &self.m
    }

    pub fn into_mat(self) -> Mat<T> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.m[(i, j)]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[T] {
        self.m.as_slice()
    }

    pub fn frobenius_norm(&self) -> T {
        self.m.frobenius_norm()
    }

    pub fn trace(&self) -> T {
        self.m.trace()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self { m: &self.m + &other.m })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self { m: &self.m - &other.m })
    }

    pub fn scale(&self, s: T) -> Self {
        Self { m: self.m.scale(s) }
    }

    /// `X · self · X` for symmetric `X`, symmetrized.
    pub fn sandwich(&self, outer: &Self) -> Result<Self> {
        check_dim(self.dim(), outer.dim())?;
        Ok(Self::from_nearly_symmetric(&(&outer.m * &self.m) * &outer.m))
    }

    /// `⟨x, self x⟩`.
    pub fn quadratic_form(&self, x: &[T]) -> T {
        let y = self.m.mul_vec(x);
        x.iter().zip(&y).map(|(&a, &b)| a * b).sum()
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<T> {
        symmetric_eigen(&self.m).values
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().last().copied().unwrap_or_else(T::zero)
    }
}

/// Symmetric matrix certified positive semidefinite, with its spectral data.
#[derive(Clone, Debug)]
pub struct PsdOperator<T> {
    matrix: SymmetricMatrix<T>,
    eigenvalues: Vec<T>,
    eigenvectors: Mat<T>,
    clip_applied: bool,
}

impl<T: Scalar> PsdOperator<T> {
    /// Decomposes with the default clipping tolerance.
    pub fn new(m: SymmetricMatrix<T>) -> Result<Self> {
        Self::with_clip_tol(m, lit(DEFAULT_CLIP_TOL))
    }

    /// Decomposes `m`; eigenvalues in `[-clip_tol (1 + λ_max), 0)` are set
    /// to zero, anything more negative is rejected.
    pub fn with_clip_tol(m: SymmetricMatrix<T>, clip_tol: T) -> Result<Self> {
        let eig = symmetric_eigen(m.as_mat());
        let lmax = eig.values.first().copied().unwrap_or_else(T::zero).max(T::zero());
        let threshold = clip_tol * (T::one() + lmax);
        let mut clip_applied = false;
        let mut values = eig.values;
        for v in values.iter_mut() {
            if *v < T::zero() {
                if *v < -threshold {
                    return Err(Error::NotPsd { eigenvalue: to_f64(*v), threshold: to_f64(threshold) });
                }
                *v = T::zero();
                clip_applied = true;
            }
        }
        Ok(Self { matrix: m, eigenvalues: values, eigenvectors: eig.vectors, clip_applied })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: SymmetricMatrix::zeros(dim),
            eigenvalues: vec![T::zero(); dim],
            eigenvectors: Mat::identity(dim),
            clip_applied: false,
        }
    }

    /// Operator with the given eigenbasis (columns, orthonormal) and
    /// nonnegative spectrum; the matrix is assembled from the spectral data.
    pub(crate) fn from_spectral(values: Vec<T>, vectors: Mat<T>) -> Self {
        let matrix = SymmetricMatrix::from_nearly_symmetric(spectral_assemble(&values, &vectors));
        Self { matrix, eigenvalues: values, eigenvectors: vectors, clip_applied: false }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &SymmetricMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> SymmetricMatrix<T> {
        self.matrix
    }

    /// Clipped eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Eigenvectors as columns, ordered like [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &Mat<T> {
        &self.eigenvectors
    }

    pub fn clip_applied(&self) -> bool {
        self.clip_applied
    }

    pub fn lambda_max(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    pub fn frobenius_norm(&self) -> T {
        self.matrix.frobenius_norm()
    }

    pub fn trace(&self) -> T {
        self.matrix.trace()
    }

    /// `Q f(Λ) Qᵀ`.
    pub fn spectral_map(&self, f: impl Fn(T) -> T) -> SymmetricMatrix<T> {
        let values: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        SymmetricMatrix::from_nearly_symmetric(spectral_assemble(&values, &self.eigenvectors))
    }

    /// Indices of eigenvalues strictly above `rank_tol · λ_max`.
    pub(crate) fn significant(&self, rank_tol: T) -> Vec<usize> {
        let cut = rank_tol * self.lambda_max();
        (0..self.dim()).filter(|&i| self.eigenvalues[i] > cut && self.eigenvalues[i] > T::zero()).collect()
    }
}

fn spectral_assemble<T: Scalar>(values: &[T], vectors: &Mat<T>) -> Mat<T> {
    let n = vectors.nrows();
    let mut out = Mat::zeros(n, n);
    for (k, &l) in values.iter().enumerate() {
        if l == T::zero() {
            continue;
        }
        for i in 0..n {
            let a = vectors[(i, k)] * l;
            if a == T::zero() {
                continue;
            }
            for j in 0..n {
                out[(i, j)] = out[(i, j)] + a * vectors[(j, k)];
            }
        }
    }
    out
}

/// Orthogonal projection: symmetric and idempotent.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection<T> {
    matrix: SymmetricMatrix<T>,
    rank: usize,
}

impl<T: Scalar> Projection<T> {
    /// Validates idempotence and a `{0, 1}` spectrum within [`PROJECTION_TOL`].
    pub fn new(m: SymmetricMatrix<T>) -> Result<Self> {
        let d = m.dim();
        let tol: T = lit(PROJECTION_TOL);
        let sq = m.as_mat() * m.as_mat();
        let idem = (&sq - m.as_mat()).frobenius_norm();
        if idem > tol * lit(d.max(1) as f64) {
            return Err(Error::NotProjection { reason: format!("|P^2 - P|_F = {:e}", to_f64(idem)) });
        }
        let mut rank = 0;
        for l in m.eigenvalues() {
            if (l - T::one()).abs() <= tol {
                rank += 1;
            } else if l.abs() > tol {
                return Err(Error::NotProjection { reason: format!("eigenvalue {:e} not in {{0, 1}}", to_f64(l)) });
            }
        }
        Ok(Self { matrix: m, rank })
    }

    pub fn zero(dim: usize) -> Self {
        Self { matrix: SymmetricMatrix::zeros(dim), rank: 0 }
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: SymmetricMatrix::identity(dim), rank: dim }
    }

    /// `B Bᵀ` for an orthonormal frame `B`; trusted, not re-validated.
    pub(crate) fn from_frame(basis: &Mat<T>) -> Self {
        let m = basis.matmul(&basis.transpose());
        Self { matrix: SymmetricMatrix::from_nearly_symmetric(m), rank: basis.ncols() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn matrix(&self) -> &SymmetricMatrix<T> {
        &self.matrix
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        let m = &Mat::identity(self.dim()) - self.matrix.as_mat();
        Self { matrix: SymmetricMatrix::from_nearly_symmetric(m), rank: self.dim() - self.rank }
    }

    /// Range of the projection as an orthonormal frame.
    pub fn range(&self) -> Subspace<T> {
        spectral_cluster(&self.matrix, |l| l >= lit(0.5))
    }
}

/// Subspace of `R^d` given by an orthonormal column frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T> {
    basis: Mat<T>,
}

impl<T: Scalar> Subspace<T> {
    /// Accepts a `d x r` frame whose columns are orthonormal within `1e-12 r`.
    pub fn from_orthonormal(basis: Mat<T>) -> Result<Self> {
        let r = basis.ncols();
        let dev = (&basis.tr_matmul(&basis) - &Mat::identity(r)).frobenius_norm();
        if dev > lit::<T>(1e-12) * lit(r.max(1) as f64) {
            return Err(Error::NotOrthonormal { deviation: to_f64(dev) });
        }
        Ok(Self { basis })
    }

    /// Orthonormalizes an arbitrary spanning set.
    pub fn from_span(dim: usize, vectors: &[Vec<T>]) -> Result<Self> {
        for v in vectors {
            check_dim(dim, v.len())?;
        }
        Ok(Self { basis: orthonormal_span(dim, vectors, lit(SPAN_DROP_TOL)) })
    }

    pub fn trivial(dim: usize) -> Self {
        Self { basis: Mat::zeros(dim, 0) }
    }

    pub fn full(dim: usize) -> Self {
        Self { basis: Mat::identity(dim) }
    }

    pub(crate) fn from_frame_unchecked(basis: Mat<T>) -> Self {
        Self { basis }
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Dimension of the subspace.
    #[inline]
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &Mat<T> {
        &self.basis
    }

    pub fn projection(&self) -> Projection<T> {
        Projection::from_frame(&self.basis)
    }

    /// Orthogonal complement in the ambient space.
    pub fn complement(&self) -> Self {
        kernel(&self.projection())
    }

    /// `|x - P x|`.
    pub fn distance(&self, x: &[T]) -> T {
        let c = self.basis.transpose().mul_vec(x);
        let px = self.basis.mul_vec(&c);
        let r: Vec<T> = x.iter().zip(&px).map(|(&a, &b)| a - b).collect();
        norm(&r)
    }
}

fn spectral_cluster<T: Scalar>(m: &SymmetricMatrix<T>, keep: impl Fn(T) -> bool) -> Subspace<T> {
    let eig = symmetric_eigen(m.as_mat());
    let idx: Vec<usize> = (0..m.dim()).filter(|&i| keep(eig.values[i])).collect();
    Subspace { basis: eig.vectors.select_columns(&idx) }
}

/// Outcome of a Loewner comparison `a ≤ b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoewnerComparison<T> {
    pub holds: bool,
    /// `λ_min(b - a)`.
    pub margin: T,
}

/// Eigendecomposes `m`, clipping tiny negative eigenvalues.
pub fn spectral_decompose<T: Scalar>(m: &SymmetricMatrix<T>) -> Result<PsdOperator<T>> {
    PsdOperator::new(m.clone())
}

/// Principal square root via the cached spectral decomposition.
pub fn psd_sqrt<T: Scalar>(r: &PsdOperator<T>) -> PsdOperator<T> {
    let values: Vec<T> = r.eigenvalues.iter().map(|&l| l.sqrt()).collect();
    PsdOperator::from_spectral(values, r.eigenvectors.clone())
}

/// Moore-Penrose pseudoinverse, inverting eigenvalues above `rank_tol · λ_max`.
pub fn pinv_psd<T: Scalar>(r: &PsdOperator<T>, rank_tol: T) -> SymmetricMatrix<T> {
    let keep = r.significant(rank_tol);
    let values: Vec<T> = (0..r.dim())
        .map(|i| if keep.contains(&i) { T::one() / r.eigenvalues[i] } else { T::zero() })
        .collect();
    SymmetricMatrix::from_nearly_symmetric(spectral_assemble(&values, &r.eigenvectors))
}

/// Tests `a ≤ b`: holds iff `λ_min(b - a) ≥ -tol (1 + |b|_F)`.
pub fn loewner_leq<T: Scalar>(
    a: &SymmetricMatrix<T>,
    b: &SymmetricMatrix<T>,
    tol: T,
) -> Result<LoewnerComparison<T>> {
    let diff = b.sub(a)?;
    let margin = diff.min_eigenvalue();
    let holds = margin >= -tol * (T::one() + b.frobenius_norm());
    Ok(LoewnerComparison { holds, margin })
}

/// Projection onto the span of `vectors` (which may be dependent or empty).
pub fn proj_from_span<T: Scalar>(dim: usize, vectors: &[Vec<T>]) -> Result<Projection<T>> {
    Ok(Subspace::from_span(dim, vectors)?.projection())
}

/// Kernel of a projection: the eigenspace for eigenvalue 0.
pub fn kernel<T: Scalar>(p: &Projection<T>) -> Subspace<T> {
    spectral_cluster(&p.matrix, |l| l < lit(0.5))
}

/// `ker pa ∩ ker pb`, computed as `ker(pa + pb)`; eigenvalues `≤ tol` count as zero.
pub fn kernel_intersection<T: Scalar>(pa: &Projection<T>, pb: &Projection<T>, tol: T) -> Result<Subspace<T>> {
    let sum = pa.matrix.add(&pb.matrix)?;
    Ok(spectral_cluster(&sum, |l| l <= tol))
}

/// `|ab - ba|_F`.
pub fn commutator_norm<T: Scalar>(a: &SymmetricMatrix<T>, b: &SymmetricMatrix<T>) -> Result<T> {
    check_dim(a.dim(), b.dim())?;
    let ab = a.as_mat() * b.as_mat();
    let ba = b.as_mat() * a.as_mat();
    Ok((&ab - &ba).frobenius_norm())
}

/// Projection onto eigenvectors with eigenvalue above `rank_tol · λ_max`.
pub fn support_projection<T: Scalar>(r: &PsdOperator<T>, rank_tol: T) -> Projection<T> {
    Projection::from_frame(&support_frame(r, rank_tol))
}

pub(crate) fn support_frame<T: Scalar>(r: &PsdOperator<T>, rank_tol: T) -> Mat<T> {
    r.eigenvectors.select_columns(&r.significant(rank_tol))
}
