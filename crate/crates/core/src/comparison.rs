//! End-to-end comparison of the flow limit with the shorted operator.
//!
//! [`compare`] runs the ambient flow, the intrinsic flow and both shorting
//! routes on one triple `(R_0, P_A, P_B)` and collects every quantity the
//! structural results predict, so callers can check them in one place.

use crate::error::{Error, Result};
use crate::factorization::{
    commuting_shortcut, gap, kernel_comparison, run_intrinsic_flow_with, GapResult, IntrinsicTrace, KernelComparison,
    OperatorRange,
};
use crate::flow::{energy_report, fixed_point_residual, run_flow, support_residual, EnergyReport, FlowConfig, FlowTrace};
use crate::psd::{
    commutator_norm, kernel_intersection, loewner_leq, psd_sqrt, PsdOperator, Projection, Subspace, SymmetricMatrix,
    DEFAULT_RANK_TOL,
};
use crate::shorting::{shorted_intrinsic_with, ShortedResult};
use crate::scalar::{lit, Scalar};

/// Tolerance levels applied by [`GapReport::violations`]; all relative to
/// `1 + |R_0|_F` unless noted.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckTolerances<T> {
    pub kernel: T,
    pub rank: T,
    pub commuting: T,
    /// Rank and mass tolerance of the `ker S ⊂ ker R_∞` test; must exceed
    /// the mass the stopping rule leaves in `R_∞`.
    pub kernel_comparison: T,
    /// Loewner chain `0 ≤ R_∞ ≤ S ≤ R_0`.
    pub chain: T,
    /// `0 ≤ T_∞ ≤ P_M`.
    pub contraction: T,
    pub support: T,
    pub fixed_point: T,
    pub localization: T,
    /// Ambient versus intrinsic flow limits, and the commuting shortcut.
    pub end_to_end: T,
    /// Per-step telescoping of the ledger.
    pub telescoping: T,
    /// Global energy balance, further multiplied by the iteration count.
    pub energy: T,
}

impl<T: Scalar> Default for CheckTolerances<T> {
    fn default() -> Self {
        Self {
            kernel: lit(1e-10),
            rank: lit(DEFAULT_RANK_TOL),
            commuting: lit(1e-10),
            kernel_comparison: lit(1e-8),
            chain: lit(1e-8),
            contraction: lit(1e-9),
            support: lit(1e-6),
            fixed_point: lit(1e-8),
            localization: lit(1e-8),
            end_to_end: lit(1e-7),
            telescoping: lit(1e-10),
            energy: lit(1e-9),
        }
    }
}

/// Joint result of the flow, shorting and factorization on one triple.
#[derive(Clone, Debug)]
pub struct GapReport<T> {
    pub k: Subspace<T>,
    pub flow: FlowTrace<T>,
    pub energy: EnergyReport<T>,
    pub shorted: ShortedResult<T>,
    pub intrinsic: IntrinsicTrace<T>,
    /// `Err` when `G` or `S - R_∞` fails to certify as positive, which is
    /// expected before convergence.
    pub gap: std::result::Result<GapResult<T>, Error>,
    /// `|S - R_∞|_F`, available even when `gap` is an error.
    pub gap_fro: T,
    /// `|P_M - T_∞|_F`, without positivity certification.
    pub g_fro: T,
    /// `|(S - R_∞) - R_0^{1/2} (P_M - T_∞) R_0^{1/2}|_F`, without positivity
    /// certification; holds at every iterate, not only in the limit.
    pub localization_residual: T,
    /// `|P_M - T_∞|_F ≤ 1e-8 d`.
    pub equality_flag: bool,
    /// `|[R_0, P_A]|, |[R_0, P_B]|, |[P_A, P_B]|`.
    pub commutators: [T; 3],
    pub shortcut: Option<PsdOperator<T>>,
    /// `|shortcut - R_∞|_F`.
    pub shortcut_discrepancy: Option<T>,
    pub kernel: KernelComparison<T>,
    pub fixed_point_residuals: [T; 2],
    pub support_residual: T,
    /// `|R_0^{1/2} T_∞ R_0^{1/2} - R_∞|_F`.
    pub intrinsic_discrepancy: T,
    /// Loewner margins of `0 ≤ R_∞`, `R_∞ ≤ S`, `S ≤ R_0`.
    pub chain_margins: [T; 3],
    /// Loewner margins of `0 ≤ T_∞`, `T_∞ ≤ P_M`.
    pub contraction_margins: [T; 2],
    pub scale: T,
    pub tolerances: CheckTolerances<T>,
}

/// A failed structural check.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub invariant: &'static str,
    pub value: f64,
    pub limit: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {:e} (limit {:e})", self.invariant, self.value, self.limit)
    }
}

pub fn compare<T: Scalar>(
    r0: &PsdOperator<T>,
    pa: &Projection<T>,
    pb: &Projection<T>,
    cfg: &FlowConfig<T>,
) -> Result<GapReport<T>> {
    compare_with(r0, pa, pb, cfg, CheckTolerances::default())
}

pub fn compare_with<T: Scalar>(
    r0: &PsdOperator<T>,
    pa: &Projection<T>,
    pb: &Projection<T>,
    cfg: &FlowConfig<T>,
    tolerances: CheckTolerances<T>,
) -> Result<GapReport<T>> {
    let cfg = FlowConfig { ledger_enabled: true, ..cfg.clone() };
    let scale = T::one() + r0.frobenius_norm();
    let k = kernel_intersection(pa, pb, tolerances.kernel)?;
    let flow = run_flow(r0, pa, pb, &cfg)?;
    let energy = energy_report(&flow)?;
    let shorted = shorted_intrinsic_with(r0, &k, tolerances.rank)?;
    let intrinsic = run_intrinsic_flow_with(r0, pa, pb, &cfg, tolerances.rank)?;
    let r_inf = &flow.r_inf;

    let gap_fro = shorted.s.matrix().sub(r_inf.matrix())?.frobenius_norm();
    let gap = gap(r0, &shorted.p_m, &shorted.s, &intrinsic.t_inf, r_inf);
    let g_raw = shorted.p_m.matrix().sub(&intrinsic.t_inf.t)?;
    let g_fro = g_raw.frobenius_norm();
    let localized = g_raw.sandwich(psd_sqrt(r0).matrix())?;
    let localization_residual = shorted.s.matrix().sub(r_inf.matrix())?.sub(&localized)?.frobenius_norm();
    let equality_flag = g_fro <= lit::<T>(1e-8) * lit(r0.dim() as f64);

    let commutators = [
        commutator_norm(r0.matrix(), pa.matrix())?,
        commutator_norm(r0.matrix(), pb.matrix())?,
        commutator_norm(pa.matrix(), pb.matrix())?,
    ];
    let shortcut = commuting_shortcut(r0, pa, pb, tolerances.commuting)?;
    let shortcut_discrepancy = match &shortcut {
        Some(s) => Some(s.matrix().sub(r_inf.matrix())?.frobenius_norm()),
        None => None,
    };

    let range = OperatorRange::new(r0, tolerances.rank);
    let pushed = range.push_forward(&intrinsic.t_inf.t)?;
    let intrinsic_discrepancy = pushed.sub(r_inf.matrix())?.frobenius_norm();

    let zero = SymmetricMatrix::zeros(r0.dim());
    let chain_margins = [
        loewner_leq(&zero, r_inf.matrix(), T::zero())?.margin,
        loewner_leq(r_inf.matrix(), shorted.s.matrix(), T::zero())?.margin,
        loewner_leq(shorted.s.matrix(), r0.matrix(), T::zero())?.margin,
    ];
    let contraction_margins = [
        loewner_leq(&zero, &intrinsic.t_inf.t, T::zero())?.margin,
        loewner_leq(&intrinsic.t_inf.t, shorted.p_m.matrix(), T::zero())?.margin,
    ];

    Ok(GapReport {
        kernel: kernel_comparison(&shorted.s, r_inf, tolerances.kernel_comparison)?,
        fixed_point_residuals: [fixed_point_residual(r_inf, pa)?, fixed_point_residual(r_inf, pb)?],
        support_residual: support_residual(r_inf, pa, pb)?,
        k,
        flow,
        energy,
        shorted,
        intrinsic,
        gap,
        gap_fro,
        g_fro,
        localization_residual,
        equality_flag,
        commutators,
        shortcut,
        shortcut_discrepancy,
        intrinsic_discrepancy,
        chain_margins,
        contraction_margins,
        scale,
        tolerances,
    })
}

impl<T: Scalar> GapReport<T> {
    pub fn converged(&self) -> bool {
        self.flow.converged && self.intrinsic.converged
    }

    /// Checks every structural prediction. Limit properties are only
    /// meaningful after convergence and are skipped otherwise; per-step
    /// ledger checks always run.
    pub fn violations(&self) -> Vec<Violation> {
        let tol = &self.tolerances;
        let s = self.scale;
        let mut out = Vec::new();
        let mut check = |name: &'static str, value: T, limit: T| {
            if !(value <= limit) {
                out.push(Violation { invariant: name, value: value.to_f64().unwrap_or(f64::NAN), limit: limit.to_f64().unwrap_or(f64::NAN) });
            }
        };

        let worst_step = self.flow.telescoping_residuals.iter().copied().fold(T::zero(), T::max);
        check("ledger telescoping", worst_step, tol.telescoping * s);
        let iters = lit::<T>(self.flow.iterate_count.max(1) as f64);
        check("energy identity", self.energy.residual_norm, tol.energy * s * iters);
        check("gap localization", self.localization_residual, tol.localization * s);

        if !self.converged() {
            return out;
        }
        let names = ["chain 0 <= R_inf", "chain R_inf <= S", "chain S <= R_0"];
        for (name, &m) in names.iter().zip(&self.chain_margins) {
            check(name, -m, tol.chain * s);
        }
        // contraction margins are relative to 1 + |b|_F as in loewner_leq
        let pm_scale = T::one() + self.shorted.p_m.matrix().frobenius_norm();
        let t_scale = T::one() + self.intrinsic.t_inf.t.frobenius_norm();
        check("contraction 0 <= T_inf", -self.contraction_margins[0], tol.contraction * t_scale);
        check("contraction T_inf <= P_M", -self.contraction_margins[1], tol.contraction * pm_scale);
        check("support of R_inf in K", self.support_residual, tol.support * s);
        check("fixed point under P_A", self.fixed_point_residuals[0], tol.fixed_point * s);
        check("fixed point under P_B", self.fixed_point_residuals[1], tol.fixed_point * s);
        check("intrinsic flow matches ambient flow", self.intrinsic_discrepancy, tol.end_to_end * s);
        match &self.gap {
            Ok(g) => check("range of G within M", g.range_residual, tol.fixed_point),
            Err(_) => check("gap operator positivity", T::infinity(), T::zero()),
        }
        if let Some(d) = self.shortcut_discrepancy {
            check("commuting shortcut matches flow", d, tol.end_to_end * s);
        }
        if !self.kernel.holds {
            check("ker S within ker R_inf", T::infinity(), T::zero());
        }
        out
    }
}
