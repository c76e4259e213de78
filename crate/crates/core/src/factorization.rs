//! Operator-range machinery on `H_{R_0} = ran R_0^{1/2}`.
//!
//! Any `0 ≤ R ≤ R_0` is represented as `R = R_0^{1/2} T R_0^{1/2}` with a
//! unique positive contraction `T` supported in `H_{R_0}`. The residual maps
//! pull back to maps `Ψ_P` on such contractions, and the gap between the
//! flow limit and the shorted operator is measured by `G = P_M - T_∞`.

use crate::dense::Mat;
use crate::eigen::symmetric_eigen;
use crate::error::{check_dim, Error, Result};
use crate::flow::{residual_map, step_projection, FlowConfig, StallCounter};
use crate::psd::{
    commutator_norm, kernel_intersection, loewner_leq, psd_sqrt, support_frame, PsdOperator, Projection, Subspace,
    SymmetricMatrix, DEFAULT_RANK_TOL,
};
use crate::scalar::{lit, to_f64, Scalar};

/// Loewner tolerance for the order preconditions `a ≤ b`.
pub const ORDER_TOL: f64 = 1e-9;
/// Clip tolerance for certifying `G` positive.
const GAP_CLIP_TOL: f64 = 1e-9;
/// Clip tolerance for certifying `S - R_∞` positive.
const GAP_OPERATOR_CLIP_TOL: f64 = 1e-8;
/// Kernel tolerance for `P_K` in the commuting shortcut.
const KERNEL_TOL: f64 = 1e-10;

/// Contraction `X` with `A^{1/2} = X B^{1/2}`.
#[derive(Clone, Debug)]
pub struct DouglasFactor<T> {
    pub x: Mat<T>,
    /// Operator norm `|X|`.
    pub norm_bound: T,
}

/// Square root of `R_0` together with its pseudoinverse and range, sharing
/// one rank decision.
#[derive(Clone, Debug)]
pub struct OperatorRange<T> {
    r0: PsdOperator<T>,
    sqrt: SymmetricMatrix<T>,
    sqrt_pinv: SymmetricMatrix<T>,
    support: Projection<T>,
    basis: Subspace<T>,
    /// Eigenvectors of `R_0`, columnwise.
    frame: Mat<T>,
    /// `λ_i^{1/2}` on retained eigenvalues, zero elsewhere.
    root: Vec<T>,
    /// `λ_i^{-1/2}` on retained eigenvalues, zero elsewhere.
    root_inv: Vec<T>,
}

impl<T: Scalar> OperatorRange<T> {
    pub fn new(r0: &PsdOperator<T>, rank_tol: T) -> Self {
        let keep = support_frame(r0, rank_tol);
        let root = psd_sqrt(r0);
        let idx = r0.significant(rank_tol);
        let kept = |i: usize, x: T| if idx.contains(&i) { x } else { T::zero() };
        let root_kept: Vec<T> = (0..r0.dim()).map(|i| kept(i, root.eigenvalues()[i])).collect();
        let root_inv: Vec<T> = (0..r0.dim()).map(|i| kept(i, T::one() / root.eigenvalues()[i])).collect();
        let sqrt_pinv = PsdOperator::from_spectral(root_inv.clone(), r0.eigenvectors().clone()).into_matrix();
        let basis = Subspace::from_frame_unchecked(keep);
        Self {
            r0: r0.clone(),
            sqrt: root.into_matrix(),
            sqrt_pinv,
            support: basis.projection(),
            basis,
            frame: r0.eigenvectors().clone(),
            root: root_kept,
            root_inv,
        }
    }

    /// `Vᵀ M V` in the eigenbasis of `R_0`.
    pub(crate) fn to_coords(&self, m: &SymmetricMatrix<T>) -> Mat<T> {
        self.frame.tr_matmul(&(m.as_mat() * &self.frame))
    }

    pub(crate) fn from_coords(&self, c: &Mat<T>) -> SymmetricMatrix<T> {
        let vc = &self.frame * c;
        SymmetricMatrix::from_nearly_symmetric(&vc * &self.frame.transpose())
    }

    /// Entrywise `c_ij f_i f_j`; exact up to one rounding per entry, so
    /// pushing and pulling in coordinates do not amplify by `cond(R_0)`.
    fn scale_coords(c: &Mat<T>, f: &[T]) -> Mat<T> {
        Mat::from_fn(c.nrows(), c.ncols(), |i, j| c[(i, j)] * f[i] * f[j])
    }

    pub(crate) fn push_coords(&self, tc: &Mat<T>) -> Mat<T> {
        Self::scale_coords(tc, &self.root)
    }

    pub(crate) fn pull_coords(&self, rc: &Mat<T>) -> Mat<T> {
        Self::scale_coords(rc, &self.root_inv)
    }

    pub fn r0(&self) -> &PsdOperator<T> {
        &self.r0
    }

    /// `R_0^{1/2}`.
    pub fn sqrt(&self) -> &SymmetricMatrix<T> {
        &self.sqrt
    }

    /// `(R_0^{1/2})†`.
    pub fn sqrt_pinv(&self) -> &SymmetricMatrix<T> {
        &self.sqrt_pinv
    }

    /// `P_{H_{R_0}}`.
    pub fn support(&self) -> &Projection<T> {
        &self.support
    }

    pub fn subspace(&self) -> &Subspace<T> {
        &self.basis
    }

    /// `R_0^{1/2} T R_0^{1/2}`.
    pub fn push_forward(&self, t: &SymmetricMatrix<T>) -> Result<SymmetricMatrix<T>> {
        check_dim(self.r0.dim(), t.dim())?;
        Ok(self.from_coords(&self.push_coords(&self.to_coords(t))))
    }

    /// `(R_0^{1/2})† R (R_0^{1/2})†`, supported in `H_{R_0}`.
    pub fn pull_back(&self, r: &SymmetricMatrix<T>) -> Result<SymmetricMatrix<T>> {
        check_dim(self.r0.dim(), r.dim())?;
        Ok(self.from_coords(&self.pull_coords(&self.to_coords(r))))
    }
}

/// `T` with `R = R_0^{1/2} T R_0^{1/2}`, acting on `H_{R_0}`.
#[derive(Clone, Debug)]
pub struct IntrinsicContraction<T> {
    pub t: SymmetricMatrix<T>,
    pub h_r0: Subspace<T>,
}

/// Outcome of iterating `Ψ_{P_n}` from `T_0 = P_{H_{R_0}}`.
#[derive(Clone, Debug)]
pub struct IntrinsicTrace<T> {
    pub t_inf: IntrinsicContraction<T>,
    pub iterate_count: usize,
    /// `|R_0^{1/2} (T_{n+1} - T_n) R_0^{1/2}|_F` per step.
    pub deltas: Vec<T>,
    /// `R_0^{1/2} T_n R_0^{1/2}` for every `n` when `keep_iterates` is set.
    pub pushed_iterates: Vec<SymmetricMatrix<T>>,
    pub converged: bool,
}

/// Gap between the shorted operator and the flow limit.
#[derive(Clone, Debug)]
pub struct GapResult<T> {
    /// `G = P_M - T_∞`.
    pub g: PsdOperator<T>,
    /// `S - R_∞`.
    pub gap_operator: PsdOperator<T>,
    /// `|S - R_∞|_F`.
    pub gap_fro: T,
    /// `|(S - R_∞) - R_0^{1/2} G R_0^{1/2}|_F`.
    pub localization_residual: T,
    /// `|(I - P_M) G|_F`.
    pub range_residual: T,
    /// Set when `|G|_F ≤ 1e-8 d`.
    pub equality_flag: bool,
}

/// Result of checking `ker S ⊂ ker R_∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelComparison<T> {
    pub holds: bool,
    pub witness: Option<Vec<T>>,
}

fn require_order<T: Scalar>(a: &SymmetricMatrix<T>, b: &SymmetricMatrix<T>) -> Result<()> {
    let tol = lit::<T>(ORDER_TOL);
    let c = loewner_leq(a, b, tol)?;
    if c.holds {
        Ok(())
    } else {
        Err(Error::OrderViolation {
            margin: to_f64(c.margin),
            tolerance: to_f64(tol * (T::one() + b.frobenius_norm())),
        })
    }
}

/// Operator 2-norm of a rectangular matrix.
pub fn operator_norm<T: Scalar>(x: &Mat<T>) -> T {
    let g = x.tr_matmul(x);
    symmetric_eigen(&g).values.first().copied().unwrap_or_else(T::zero).max(T::zero()).sqrt()
}

/// `X = A^{1/2} (B^{1/2})†` for `0 ≤ A ≤ B`; maps `H_B` into `H_A` and
/// vanishes on `H_B^⊥`.
pub fn douglas_factor<T: Scalar>(a: &PsdOperator<T>, b: &PsdOperator<T>, rank_tol: T) -> Result<DouglasFactor<T>> {
    check_dim(a.dim(), b.dim())?;
    require_order(a.matrix(), b.matrix())?;
    let range = OperatorRange::new(b, rank_tol);
    let a_half = psd_sqrt(a);
    let x = &(a_half.matrix().as_mat() * range.sqrt_pinv().as_mat()) * range.support().matrix().as_mat();
    let norm_bound = operator_norm(&x);
    Ok(DouglasFactor { x, norm_bound })
}

/// Unique `0 ≤ T ≤ P_{H_{R_0}}` with `R = R_0^{1/2} T R_0^{1/2}`.
pub fn intrinsic_contraction<T: Scalar>(
    r: &PsdOperator<T>,
    r0: &PsdOperator<T>,
    rank_tol: T,
) -> Result<IntrinsicContraction<T>> {
    check_dim(r.dim(), r0.dim())?;
    require_order(r.matrix(), r0.matrix())?;
    let range = OperatorRange::new(r0, rank_tol);
    Ok(IntrinsicContraction { t: range.pull_back(r.matrix())?, h_r0: range.subspace().clone() })
}

/// Contraction of `R` relative to a precomputed range; no order check.
pub fn contraction_in<T: Scalar>(range: &OperatorRange<T>, r: &SymmetricMatrix<T>) -> Result<IntrinsicContraction<T>> {
    Ok(IntrinsicContraction { t: range.pull_back(r)?, h_r0: range.subspace().clone() })
}

fn psi_in<T: Scalar>(range: &OperatorRange<T>, t: &SymmetricMatrix<T>, p: &Projection<T>) -> Result<SymmetricMatrix<T>> {
    let r = PsdOperator::new(range.push_forward(t)?)?;
    let next = residual_map(&r, p)?;
    range.pull_back(next.matrix())
}

/// `Ψ_P(T)`, defined by `Φ_P(R_0^{1/2} T R_0^{1/2}) = R_0^{1/2} Ψ_P(T) R_0^{1/2}`.
pub fn psi_map<T: Scalar>(
    t: &IntrinsicContraction<T>,
    p: &Projection<T>,
    r0: &PsdOperator<T>,
) -> Result<IntrinsicContraction<T>> {
    check_dim(r0.dim(), t.t.dim())?;
    check_dim(r0.dim(), p.dim())?;
    let range = OperatorRange::new(r0, lit(DEFAULT_RANK_TOL));
    Ok(IntrinsicContraction { t: psi_in(&range, &t.t, p)?, h_r0: range.subspace().clone() })
}

/// Iterates `T_{n+1} = Ψ_{P_n}(T_n)` from `T_0 = P_{H_{R_0}}` with the
/// alternating schedule of [`crate::flow::run_flow`].
///
/// Steps are measured after pushing forward, `|R_0^{1/2}(T_{n+1} - T_n)R_0^{1/2}|_F`,
/// so the stopping rule coincides with the ambient flow's.
pub fn run_intrinsic_flow<T: Scalar>(
    r0: &PsdOperator<T>,
    pa: &Projection<T>,
    pb: &Projection<T>,
    cfg: &FlowConfig<T>,
) -> Result<IntrinsicTrace<T>> {
    run_intrinsic_flow_with(r0, pa, pb, cfg, lit(DEFAULT_RANK_TOL))
}

pub fn run_intrinsic_flow_with<T: Scalar>(
    r0: &PsdOperator<T>,
    pa: &Projection<T>,
    pb: &Projection<T>,
    cfg: &FlowConfig<T>,
    rank_tol: T,
) -> Result<IntrinsicTrace<T>> {
    cfg.validate()?;
    check_dim(r0.dim(), pa.dim())?;
    check_dim(r0.dim(), pb.dim())?;
    let range = OperatorRange::new(r0, rank_tol);
    let threshold = cfg.stop_tol * (T::one() + r0.frobenius_norm());

    // iterate in the eigenbasis of R_0, where push-forward is a diagonal scaling
    let mut tc = range.to_coords(range.support().matrix());
    let mut pushed = range.push_coords(&tc);
    let mut trace = IntrinsicTrace {
        t_inf: IntrinsicContraction { t: range.support().matrix().clone(), h_r0: range.subspace().clone() },
        iterate_count: 0,
        deltas: Vec::new(),
        pushed_iterates: Vec::new(),
        converged: false,
    };
    if cfg.keep_iterates {
        trace.pushed_iterates.push(range.from_coords(&pushed));
    }
    let mut stall = StallCounter::default();
    for n in 0..cfg.max_iter {
        let r = PsdOperator::new(range.from_coords(&pushed))?;
        let next = residual_map(&r, step_projection(n, pa, pb))?;
        tc = range.pull_coords(&range.to_coords(next.matrix()));
        let next_pushed = range.push_coords(&tc);
        let delta = (&next_pushed - &pushed).frobenius_norm();
        trace.deltas.push(delta);
        trace.iterate_count = n + 1;
        if cfg.keep_iterates {
            trace.pushed_iterates.push(range.from_coords(&next_pushed));
        }
        pushed = next_pushed;
        if stall.observe(delta, threshold) {
            trace.converged = true;
            break;
        }
    }
    trace.t_inf.t = range.from_coords(&tc);
    Ok(trace)
}

/// `G = P_M - T_∞` together with the independently computed `S - R_∞`.
///
/// `p_m` is the projection onto `M` and `s` the shorted operator, both from
/// [`crate::shorting::shorted_intrinsic`]; `r_inf` is the ambient flow limit.
pub fn gap<T: Scalar>(
    r0: &PsdOperator<T>,
    p_m: &Projection<T>,
    s: &PsdOperator<T>,
    t_inf: &IntrinsicContraction<T>,
    r_inf: &PsdOperator<T>,
) -> Result<GapResult<T>> {
    let d = r0.dim();
    for dim in [p_m.dim(), s.dim(), t_inf.t.dim(), r_inf.dim()] {
        check_dim(d, dim)?;
    }
    let g_mat = p_m.matrix().sub(&t_inf.t)?;
    let g_norm = g_mat.frobenius_norm();
    let g = PsdOperator::with_clip_tol(g_mat, lit(GAP_CLIP_TOL))?;
    let diff = s.matrix().sub(r_inf.matrix())?;
    let gap_fro = diff.frobenius_norm();
    let gap_operator = PsdOperator::with_clip_tol(diff.clone(), lit(GAP_OPERATOR_CLIP_TOL))?;
    let sqrt = psd_sqrt(r0);
    let localized = g.matrix().sandwich(sqrt.matrix())?;
    let localization_residual = diff.sub(&localized)?.frobenius_norm();
    let range_residual = (p_m.complement().matrix().as_mat() * g.matrix().as_mat()).frobenius_norm();
    Ok(GapResult {
        equality_flag: g_norm <= lit::<T>(1e-8) * lit(d as f64),
        g,
        gap_operator,
        gap_fro,
        localization_residual,
        range_residual,
    })
}

/// When `R_0`, `P_A`, `P_B` pairwise commute (commutators within
/// `tol (1 + |R_0|_F)`), the flow stabilizes at `R_0 P_K`; returns it.
pub fn commuting_shortcut<T: Scalar>(
    r0: &PsdOperator<T>,
    pa: &Projection<T>,
    pb: &Projection<T>,
    tol: T,
) -> Result<Option<PsdOperator<T>>> {
    let limit = tol * (T::one() + r0.frobenius_norm());
    let r = r0.matrix();
    let norms = [
        commutator_norm(r, pa.matrix())?,
        commutator_norm(r, pb.matrix())?,
        commutator_norm(pa.matrix(), pb.matrix())?,
    ];
    if norms.iter().any(|&c| c > limit) {
        return Ok(None);
    }
    let pk = kernel_intersection(pa, pb, lit(KERNEL_TOL))?.projection();
    let prod = r.as_mat() * pk.matrix().as_mat();
    Ok(Some(PsdOperator::new(SymmetricMatrix::from_nearly_symmetric(prod))?))
}

/// Checks `ker S ⊂ ker R_∞`: every eigenvector of `s` with eigenvalue
/// `≤ rank_tol λ_max(s)` must satisfy `⟨x, R_∞ x⟩ ≤ rank_tol (1 + |R_∞|_F)`.
pub fn kernel_comparison<T: Scalar>(
    s: &PsdOperator<T>,
    r_inf: &PsdOperator<T>,
    rank_tol: T,
) -> Result<KernelComparison<T>> {
    check_dim(s.dim(), r_inf.dim())?;
    let cut = rank_tol * s.lambda_max();
    let bound = rank_tol * (T::one() + r_inf.frobenius_norm());
    for (i, &l) in s.eigenvalues().iter().enumerate() {
        if l > cut {
            continue;
        }
        let x = s.eigenvectors().column(i);
        if r_inf.matrix().quadratic_form(&x) > bound {
            return Ok(KernelComparison { holds: false, witness: Some(x) });
        }
    }
    Ok(KernelComparison { holds: true, witness: None })
}
