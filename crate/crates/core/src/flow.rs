//! The residual map `Φ_P(R) = R^{1/2} (I - P) R^{1/2}` and its alternating
//! iteration between two projections, with a per-step dissipation ledger.

use crate::error::{check_dim, Error, Result};
use crate::psd::{PsdOperator, Projection, SymmetricMatrix};
use crate::scalar::{lit, Scalar};

/// Stopping and recording options for a flow run.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowConfig<T> {
    /// Relative Frobenius step size below which a step counts as stalled.
    pub stop_tol: T,
    pub max_iter: usize,
    /// Keep every iterate `R_0, R_1, ...` in the trace.
    pub keep_iterates: bool,
    /// Record the dissipation terms `D_n` and their telescoping residuals.
    pub ledger_enabled: bool,
}

impl<T: Scalar> Default for FlowConfig<T> {
    fn default() -> Self {
        Self { stop_tol: lit(1e-12), max_iter: 10_000, keep_iterates: false, ledger_enabled: false }
    }
}

impl<T: Scalar> FlowConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.stop_tol > T::zero()) {
            return Err(Error::InvalidConfig("stop_tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// Assignment of projections to steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// `P_n = P_B` for even `n`, `P_A` for odd `n`.
    AlternatingBA,
}

impl Schedule {
    pub fn describe(&self) -> &'static str {
        match self {
            Schedule::AlternatingBA => "P_B on even steps, P_A on odd steps",
        }
    }
}

/// Record of one flow run.
#[derive(Clone, Debug)]
pub struct FlowTrace<T> {
    pub r0: PsdOperator<T>,
    /// Number of steps taken; `r_inf` is `R_{iterate_count}`.
    pub iterate_count: usize,
    /// `|R_{n+1} - R_n|_F` for each step.
    pub deltas: Vec<T>,
    pub r_inf: PsdOperator<T>,
    /// `D_n = R_n^{1/2} P_n R_n^{1/2}` when the ledger is enabled.
    pub dissipation: Vec<PsdOperator<T>>,
    /// `|(R_n - R_{n+1}) - D_n|_F` when the ledger is enabled.
    pub telescoping_residuals: Vec<T>,
    /// `R_0, ..., R_final` when `keep_iterates` is set.
    pub iterates: Vec<PsdOperator<T>>,
    pub converged: bool,
    pub schedule: Schedule,
    pub ledger_enabled: bool,
}

impl<T: Scalar> FlowTrace<T> {
    pub fn final_delta(&self) -> T {
        self.deltas.last().copied().unwrap_or_else(T::zero)
    }
}

/// Energy balance `R_0 = R_final + Σ D_n` evaluated on a trace.
#[derive(Clone, Debug)]
pub struct EnergyReport<T> {
    pub partial_sum: SymmetricMatrix<T>,
    /// `|R_0 - R_final - Σ D_n|_F`.
    pub residual_norm: T,
    pub dissipated_trace: T,
    pub surviving_trace: T,
}

/// Eigenvalues at or below `SQRT_FLOOR · λ_max` are roundoff and are dropped
/// before taking the square root inside the flow.
pub const SQRT_FLOOR: f64 = 1e-14;

/// `R^{1/2}` with the roundoff part of the spectrum set to zero. The square
/// root is not Lipschitz at zero, so noise eigenvalues `δ` would otherwise
/// perturb each step by `(δ |R|)^{1/2}`.
fn flow_sqrt<T: Scalar>(r: &PsdOperator<T>) -> PsdOperator<T> {
    let cut = lit::<T>(SQRT_FLOOR) * r.lambda_max();
    let values = r.eigenvalues().iter().map(|&l| if l > cut { l.sqrt() } else { T::zero() }).collect();
    PsdOperator::from_spectral(values, r.eigenvectors().clone())
}

fn check_pair<T: Scalar>(r: &PsdOperator<T>, p: &Projection<T>) -> Result<()> {
    check_dim(r.dim(), p.dim())
}

/// `C = (I - P) R^{1/2}` style factor: returns `Q R^{1/2}` for a projection-like `Q`.
fn left_factor<T: Scalar>(q: &SymmetricMatrix<T>, sqrt: &PsdOperator<T>) -> crate::dense::Mat<T> {
    q.as_mat() * sqrt.matrix().as_mat()
}

fn gram<T: Scalar>(c: &crate::dense::Mat<T>) -> Result<PsdOperator<T>> {
    PsdOperator::new(SymmetricMatrix::from_nearly_symmetric(c.tr_matmul(c)))
}

fn residual_from_sqrt<T: Scalar>(sqrt: &PsdOperator<T>, p: &Projection<T>) -> Result<PsdOperator<T>> {
    // R^{1/2}(I-P)R^{1/2} = CᵀC with C = (I-P)R^{1/2}
    gram(&left_factor(p.complement().matrix(), sqrt))
}

fn dissipation_from_sqrt<T: Scalar>(sqrt: &PsdOperator<T>, p: &Projection<T>) -> Result<PsdOperator<T>> {
    gram(&left_factor(p.matrix(), sqrt))
}

/// `Φ_P(R) = R^{1/2} (I - P) R^{1/2}`.
pub fn residual_map<T: Scalar>(r: &PsdOperator<T>, p: &Projection<T>) -> Result<PsdOperator<T>> {
    check_pair(r, p)?;
    residual_from_sqrt(&flow_sqrt(r), p)
}

/// `D = R^{1/2} P R^{1/2}`, the part of `R` removed by `Φ_P`.
pub fn dissipation_term<T: Scalar>(r: &PsdOperator<T>, p: &Projection<T>) -> Result<PsdOperator<T>> {
    check_pair(r, p)?;
    dissipation_from_sqrt(&flow_sqrt(r), p)
}

/// Projection applied at step `n`: `pb` for even `n`, `pa` for odd `n`.
pub fn step_projection<'a, T>(n: usize, pa: &'a Projection<T>, pb: &'a Projection<T>) -> &'a Projection<T> {
    if n % 2 == 0 {
        pb
    } else {
        pa
    }
}

/// Tracks the two-consecutive-small-steps stopping rule.
#[derive(Debug, Default)]
pub(crate) struct StallCounter {
    run: usize,
}

impl StallCounter {
    /// Returns true once two consecutive steps were below threshold.
    pub(crate) fn observe<T: Scalar>(&mut self, delta: T, threshold: T) -> bool {
        if delta <= threshold {
            self.run += 1;
        } else {
            self.run = 0;
        }
        self.run >= 2
    }
}

/// Runs `R_{n+1} = Φ_{P_n}(R_n)` until two consecutive steps satisfy
/// `|R_{n+1} - R_n|_F ≤ stop_tol (1 + |R_0|_F)` or `max_iter` is reached.
///
/// Running out of iterations is reported through `converged`, not as an error.
pub fn run_flow<T: Scalar>(
    r0: &PsdOperator<T>,
    pa: &Projection<T>,
    pb: &Projection<T>,
    cfg: &FlowConfig<T>,
) -> Result<FlowTrace<T>> {
    cfg.validate()?;
    check_pair(r0, pa)?;
    check_pair(r0, pb)?;

    let threshold = cfg.stop_tol * (T::one() + r0.frobenius_norm());
    let mut trace = FlowTrace {
        r0: r0.clone(),
        iterate_count: 0,
        deltas: Vec::new(),
        r_inf: r0.clone(),
        dissipation: Vec::new(),
        telescoping_residuals: Vec::new(),
        iterates: Vec::new(),
        converged: false,
        schedule: Schedule::AlternatingBA,
        ledger_enabled: cfg.ledger_enabled,
    };
    if cfg.keep_iterates {
        trace.iterates.push(r0.clone());
    }

    let mut current = r0.clone();
    let mut stall = StallCounter::default();
    for n in 0..cfg.max_iter {
        let p = step_projection(n, pa, pb);
        let sqrt = flow_sqrt(&current);
        let next = residual_from_sqrt(&sqrt, p)?;
        let step = current.matrix().sub(next.matrix())?;
        let delta = step.frobenius_norm();

        if cfg.ledger_enabled {
            let d = dissipation_from_sqrt(&sqrt, p)?;
            trace.telescoping_residuals.push(step.sub(d.matrix())?.frobenius_norm());
            trace.dissipation.push(d);
        }
        if cfg.keep_iterates {
            trace.iterates.push(next.clone());
        }
        trace.deltas.push(delta);
        trace.iterate_count = n + 1;
        current = next;

        if stall.observe(delta, threshold) {
            trace.converged = true;
            break;
        }
    }
    trace.r_inf = current;
    Ok(trace)
}

/// Balance of the run: what was dissipated versus what survived.
pub fn energy_report<T: Scalar>(trace: &FlowTrace<T>) -> Result<EnergyReport<T>> {
    if !trace.ledger_enabled {
        return Err(Error::LedgerMissing);
    }
    let d = trace.r0.dim();
    let mut sum = SymmetricMatrix::zeros(d);
    for dn in &trace.dissipation {
        sum = sum.add(dn.matrix())?;
    }
    let residual = trace.r0.matrix().sub(trace.r_inf.matrix())?.sub(&sum)?;
    Ok(EnergyReport {
        residual_norm: residual.frobenius_norm(),
        dissipated_trace: sum.trace(),
        surviving_trace: trace.r_inf.trace(),
        partial_sum: sum,
    })
}

/// `|Φ_P(r) - r|_F`; zero exactly at fixed points of `Φ_P`.
pub fn fixed_point_residual<T: Scalar>(r: &PsdOperator<T>, p: &Projection<T>) -> Result<T> {
    let next = residual_map(r, p)?;
    Ok(next.matrix().sub(r.matrix())?.frobenius_norm())
}

/// `max(|P_A r|_F, |P_B r|_F)`; zero iff the range of `r` lies in both kernels.
pub fn support_residual<T: Scalar>(r: &PsdOperator<T>, pa: &Projection<T>, pb: &Projection<T>) -> Result<T> {
    check_pair(r, pa)?;
    check_pair(r, pb)?;
    let a = (pa.matrix().as_mat() * r.matrix().as_mat()).frobenius_norm();
    let b = (pb.matrix().as_mat() * r.matrix().as_mat()).frobenius_norm();
    Ok(a.max(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psd::spectral_decompose;
    use approx::assert_abs_diff_eq;

    fn sym(rows: &[[f64; 2]]) -> SymmetricMatrix<f64> {
        SymmetricMatrix::from_rows(rows).unwrap()
    }

    fn worked_example() -> (PsdOperator<f64>, Projection<f64>, Projection<f64>) {
        let r0 = spectral_decompose(&sym(&[[5.0, 3.0], [3.0, 2.0]])).unwrap();
        let pa = Projection::new(SymmetricMatrix::from_diagonal(&[1.0, 0.0])).unwrap();
        (r0, pa, Projection::zero(2))
    }

    fn dist(a: &SymmetricMatrix<f64>, b: &SymmetricMatrix<f64>) -> f64 {
        a.sub(b).unwrap().frobenius_norm()
    }

    #[test]
    fn residual_map_examples() {
        let (r0, pa, pb) = worked_example();
        let r1 = residual_map(&r0, &pa).unwrap();
        assert!(dist(r1.matrix(), &sym(&[[1.0, 1.0], [1.0, 1.0]])) < 1e-13);
        assert!(dist(residual_map(&r0, &pb).unwrap().matrix(), r0.matrix()) < 1e-13);
        assert!(residual_map(&r0, &Projection::identity(2)).unwrap().frobenius_norm() < 1e-13);
        assert!(matches!(residual_map(&r0, &Projection::zero(3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn schedule_parity() {
        let (_, pa, pb) = worked_example();
        assert!(std::ptr::eq(step_projection(0, &pa, &pb), &pb));
        assert!(std::ptr::eq(step_projection(1, &pa, &pb), &pa));
        assert!(std::ptr::eq(step_projection(2, &pa, &pb), &pb));
    }

    #[test]
    fn dissipation_examples() {
        let (r0, pa, _) = worked_example();
        // [[2,1],[1,1]] diag(1,0) [[2,1],[1,1]] = [[4,2],[2,1]]
        let d = dissipation_term(&r0, &pa).unwrap();
        assert!(dist(d.matrix(), &sym(&[[4.0, 2.0], [2.0, 1.0]])) < 1e-13);
        assert!(dissipation_term(&r0, &Projection::zero(2)).unwrap().frobenius_norm() < 1e-13);
        assert!(dist(dissipation_term(&r0, &Projection::identity(2)).unwrap().matrix(), r0.matrix()) < 1e-13);
    }

    #[test]
    fn worked_example_decays_to_zero() {
        let (r0, pa, pb) = worked_example();
        let cfg = FlowConfig { ledger_enabled: true, ..FlowConfig::default() };
        let trace = run_flow(&r0, &pa, &pb, &cfg).unwrap();
        assert!(trace.converged);
        assert!(trace.r_inf.frobenius_norm() < 1e-10);
        let e = energy_report(&trace).unwrap();
        assert!(dist(&e.partial_sum, r0.matrix()) < 1e-9);
        assert!(e.residual_norm < 1e-9);
    }

    #[test]
    fn flow_fixed_on_k_supported_input() {
        let (_, pa, pb) = worked_example();
        for t in [0.0, 0.3, 7.0] {
            let r = spectral_decompose(&SymmetricMatrix::from_diagonal(&[0.0, t])).unwrap();
            let cfg = FlowConfig { ledger_enabled: true, ..FlowConfig::default() };
            let trace = run_flow(&r, &pa, &pb, &cfg).unwrap();
            assert!(trace.converged);
            assert_eq!(trace.iterate_count, 2);
            assert!(dist(trace.r_inf.matrix(), r.matrix()) < 1e-10);
            let e = energy_report(&trace).unwrap();
            assert!(e.partial_sum.frobenius_norm() < 1e-12);
            assert_abs_diff_eq!(e.surviving_trace, t, epsilon = 1e-12);
        }
    }

    #[test]
    fn commuting_diagonal_triple() {
        let r0 = spectral_decompose(&SymmetricMatrix::from_diagonal(&[2.0, 3.0, 5.0])).unwrap();
        let pa = Projection::new(SymmetricMatrix::from_diagonal(&[1.0, 0.0, 0.0])).unwrap();
        let pb = Projection::new(SymmetricMatrix::from_diagonal(&[0.0, 1.0, 0.0])).unwrap();
        let cfg = FlowConfig { ledger_enabled: true, ..FlowConfig::default() };
        let trace = run_flow(&r0, &pa, &pb, &cfg).unwrap();
        assert!(trace.converged);
        assert!(dist(trace.r_inf.matrix(), &SymmetricMatrix::from_diagonal(&[0.0, 0.0, 5.0])) < 1e-12);
        let e = energy_report(&trace).unwrap();
        assert_abs_diff_eq!(e.dissipated_trace, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e.surviving_trace, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn energy_requires_ledger() {
        let (r0, pa, pb) = worked_example();
        let trace = run_flow(&r0, &pa, &pb, &FlowConfig::default()).unwrap();
        assert!(matches!(energy_report(&trace), Err(Error::LedgerMissing)));
    }

    #[test]
    fn max_iter_exhaustion_is_a_flag() {
        let (r0, pa, pb) = worked_example();
        let cfg = FlowConfig { max_iter: 5, ..FlowConfig::default() };
        let trace = run_flow(&r0, &pa, &pb, &cfg).unwrap();
        assert!(!trace.converged);
        assert_eq!(trace.iterate_count, 5);
        assert!(run_flow(&r0, &pa, &pb, &FlowConfig { max_iter: 0, ..cfg }).is_err());
    }

    #[test]
    fn residual_diagnostics() {
        let (r0, pa, pb) = worked_example();
        let z = PsdOperator::zeros(2);
        assert_eq!(fixed_point_residual(&z, &pa).unwrap(), 0.0);
        assert_eq!(fixed_point_residual(&z, &pb).unwrap(), 0.0);
        assert_abs_diff_eq!(fixed_point_residual(&r0, &pa).unwrap(), 5.0, epsilon = 1e-12);
        let in_k = spectral_decompose(&SymmetricMatrix::from_diagonal(&[0.0, 2.5])).unwrap();
        assert!(fixed_point_residual(&in_k, &pa).unwrap() < 1e-10);
        assert_eq!(support_residual(&z, &pa, &pb).unwrap(), 0.0);
        assert_eq!(support_residual(&in_k, &pa, &pb).unwrap(), 0.0);
        assert_abs_diff_eq!(support_residual(&r0, &pa, &pb).unwrap(), 34f64.sqrt(), epsilon = 1e-13);
    }
}
