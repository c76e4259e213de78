//! Shorted operator `R_0|_K`: the largest `0 ≤ X ≤ R_0` with range in `K`.
//!
//! Two independent routes are provided. [`shorted_schur`] takes the
//! generalized Schur complement of the `K^⊥` block in a frame adapted to
//! `K`. [`shorted_intrinsic`] builds `M = {u ∈ H_{R_0} : R_0^{1/2} u ∈ K}` and
//! forms `R_0^{1/2} P_M R_0^{1/2}`; it also reports how far the two routes
//! disagree.

use crate::dense::{norm, Mat};
use crate::eigen::right_svd;
use crate::error::{check_dim, Error, Result};
use crate::psd::{
    pinv_psd, psd_sqrt, support_frame, PsdOperator, Projection, Subspace, SymmetricMatrix, DEFAULT_RANK_TOL,
};
use crate::scalar::{lit, to_f64, Scalar};

/// Tolerance for vectors claimed to lie in `K`.
pub const IN_K_TOL: f64 = 1e-10;
/// Discrepancy between the two shorting routes that is treated as a failure.
pub const METHOD_DISAGREEMENT_TOL: f64 = 1e-6;
/// Clipping tolerance used when certifying the Schur complement.
const SCHUR_CLIP_TOL: f64 = 1e-9;

/// `R_0` written in an orthonormal frame `[K | K^⊥]`:
/// `[[a, b], [bᵀ, c]]`.
#[derive(Clone, Debug)]
pub struct BlockDecomposition<T> {
    pub k_basis: Subspace<T>,
    pub k_perp_basis: Subspace<T>,
    /// `Kᵀ R_0 K`, `r x r`.
    pub a_block: SymmetricMatrix<T>,
    /// `Kᵀ R_0 K^⊥`, `r x (d - r)`.
    pub b_block: Mat<T>,
    /// `K^⊥ᵀ R_0 K^⊥`, `(d - r) x (d - r)`.
    pub c_block: SymmetricMatrix<T>,
}

impl<T: Scalar> BlockDecomposition<T> {
    /// Reassembles `R_0` in the standard basis.
    pub fn reassemble(&self) -> SymmetricMatrix<T> {
        let k = self.k_basis.basis();
        let kp = self.k_perp_basis.basis();
        let kb = k * &self.b_block;
        let cross = &kb * &kp.transpose();
        let aa = &(k * self.a_block.as_mat()) * &k.transpose();
        let cc = &(kp * self.c_block.as_mat()) * &kp.transpose();
        let sum = &(&aa + &cc) + &(&cross + &cross.transpose());
        SymmetricMatrix::from_nearly_symmetric(sum)
    }
}

/// Both shorted operators plus the intermediate subspace `M`.
#[derive(Clone, Debug)]
pub struct ShortedResult<T> {
    /// `R_0^{1/2} P_M R_0^{1/2}`.
    pub s: PsdOperator<T>,
    /// Schur-complement route, for comparison.
    pub s_schur: PsdOperator<T>,
    pub m_subspace: Subspace<T>,
    /// Projection onto `M`, ambient and supported in `H_{R_0}`.
    pub p_m: Projection<T>,
    /// `|S_schur - S_intrinsic|_F`.
    pub method_discrepancy: T,
}

/// Frame change to `[K | K^⊥]`.
pub fn block_decompose<T: Scalar>(r0: &PsdOperator<T>, k: &Subspace<T>) -> Result<BlockDecomposition<T>> {
    check_dim(r0.dim(), k.ambient_dim())?;
    let kp = k.complement();
    let r = r0.matrix().as_mat();
    let kb = k.basis();
    let pb = kp.basis();
    let r_k = r * kb;
    let r_p = r * pb;
    Ok(BlockDecomposition {
        a_block: SymmetricMatrix::from_nearly_symmetric(kb.tr_matmul(&r_k)),
        b_block: kb.tr_matmul(&r_p),
        c_block: SymmetricMatrix::from_nearly_symmetric(pb.tr_matmul(&r_p)),
        k_basis: k.clone(),
        k_perp_basis: kp,
    })
}

fn schur_complement<T: Scalar>(blocks: &BlockDecomposition<T>, rank_tol: T) -> Result<SymmetricMatrix<T>> {
    let c = PsdOperator::with_clip_tol(blocks.c_block.clone(), lit(SCHUR_CLIP_TOL))?;
    let c_pinv = pinv_psd(&c, rank_tol);
    let b = &blocks.b_block;
    let bcb = &(b * c_pinv.as_mat()) * &b.transpose();
    let schur = blocks.a_block.as_mat() - &bcb;
    let k = blocks.k_basis.basis();
    Ok(SymmetricMatrix::from_nearly_symmetric(&(k * &schur) * &k.transpose()))
}

/// Generalized Schur complement `a - b c† bᵀ`, embedded on `K` and zero on `K^⊥`.
pub fn shorted_schur<T: Scalar>(r0: &PsdOperator<T>, k: &Subspace<T>) -> Result<PsdOperator<T>> {
    shorted_schur_with(r0, k, lit(DEFAULT_RANK_TOL))
}

pub fn shorted_schur_with<T: Scalar>(r0: &PsdOperator<T>, k: &Subspace<T>, rank_tol: T) -> Result<PsdOperator<T>> {
    let blocks = block_decompose(r0, k)?;
    PsdOperator::with_clip_tol(schur_complement(&blocks, rank_tol)?, lit(SCHUR_CLIP_TOL))
}

/// `M = {u ∈ H_{R_0} : (I - P_K) R_0^{1/2} u = 0}`.
///
/// The kernel is read off the right singular vectors of
/// `(I - P_K) R_0^{1/2} B`, where `B` spans `H_{R_0}`; singular values at or
/// below `rank_tol · |R_0^{1/2}|` count as zero.
pub fn subspace_m<T: Scalar>(r0: &PsdOperator<T>, k: &Subspace<T>, rank_tol: T) -> Result<Subspace<T>> {
    check_dim(r0.dim(), k.ambient_dim())?;
    let h = support_frame(r0, rank_tol);
    if h.ncols() == 0 {
        return Ok(Subspace::trivial(r0.dim()));
    }
    let sqrt = psd_sqrt(r0);
    let off_k = k.projection().complement();
    let g = &(off_k.matrix().as_mat() * sqrt.matrix().as_mat()) * &h;
    let svd = right_svd(&g);
    let cut = rank_tol * sqrt.lambda_max();
    let kernel_cols: Vec<usize> = (0..svd.values.len()).filter(|&i| svd.values[i] <= cut).collect();
    let coeffs = svd.vectors.select_columns(&kernel_cols);
    Ok(Subspace::from_frame_unchecked(&h * &coeffs))
}

/// Shorted operator via `S = R_0^{1/2} P_M R_0^{1/2}`, cross-checked against
/// the Schur route.
pub fn shorted_intrinsic<T: Scalar>(r0: &PsdOperator<T>, k: &Subspace<T>) -> Result<ShortedResult<T>> {
    shorted_intrinsic_with(r0, k, lit(DEFAULT_RANK_TOL))
}

pub fn shorted_intrinsic_with<T: Scalar>(
    r0: &PsdOperator<T>,
    k: &Subspace<T>,
    rank_tol: T,
) -> Result<ShortedResult<T>> {
    let m = subspace_m(r0, k, rank_tol)?;
    let p_m = m.projection();
    let sqrt = psd_sqrt(r0);
    let s_int = p_m.matrix().sandwich(sqrt.matrix())?;
    let s = PsdOperator::new(s_int)?;
    let s_schur = shorted_schur_with(r0, k, rank_tol)?;
    let discrepancy = s.matrix().sub(s_schur.matrix())?.frobenius_norm();
    let tolerance = lit::<T>(METHOD_DISAGREEMENT_TOL) * (T::one() + r0.frobenius_norm());
    if discrepancy > tolerance {
        return Err(Error::MethodDisagreement { discrepancy: to_f64(discrepancy), tolerance: to_f64(tolerance) });
    }
    Ok(ShortedResult { s, s_schur, m_subspace: m, p_m, method_discrepancy: discrepancy })
}

/// Minimizer `y ∈ K^⊥` of `⟨x + y, R_0 (x + y)⟩` for `x ∈ K`, from the
/// normal equations `c z = -K^⊥ᵀ R_0 x`, `y = K^⊥ z`.
pub fn variational_minimizer<T: Scalar>(r0: &PsdOperator<T>, k: &Subspace<T>, x: &[T]) -> Result<Vec<T>> {
    check_dim(r0.dim(), k.ambient_dim())?;
    check_dim(r0.dim(), x.len())?;
    let residual = k.distance(x);
    if residual > lit::<T>(IN_K_TOL) * norm(x) + T::min_positive_value() {
        return Err(Error::NotInK { residual: to_f64(residual) });
    }
    let blocks = block_decompose(r0, k)?;
    let kp = blocks.k_perp_basis.basis();
    let w = kp.transpose().mul_vec(&r0.matrix().as_mat().mul_vec(x));
    let c = PsdOperator::with_clip_tol(blocks.c_block.clone(), lit(SCHUR_CLIP_TOL))?;
    let z = pinv_psd(&c, lit(DEFAULT_RANK_TOL)).as_mat().mul_vec(&w);
    Ok(kp.mul_vec(&z).into_iter().map(|v| -v).collect())
}

/// `inf_{y ∈ K^⊥} ⟨x + y, R_0 (x + y)⟩`, which equals `⟨x, S x⟩` for `x ∈ K`.
pub fn variational_value<T: Scalar>(r0: &PsdOperator<T>, k: &Subspace<T>, x: &[T]) -> Result<T> {
    let y = variational_minimizer(r0, k, x)?;
    let z: Vec<T> = x.iter().zip(&y).map(|(&a, &b)| a + b).collect();
    Ok(r0.matrix().quadratic_form(&z))
}
