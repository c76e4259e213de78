//! Subcommand drivers. Each returns a report and the exit code it implies;
//! input problems are returned as errors.

use std::time::Instant;

use wrflow::comparison::compare_with;
use wrflow::shorting::shorted_intrinsic_with;
use wrflow::{
    commutator_norm, energy_report, fixed_point_residual, kernel_intersection, run_flow, support_residual,
    CheckTolerances, FlowConfig, FlowTrace, GapReport, Projection, PsdOperator, Subspace, DEFAULT_CLIP_TOL,
    DEFAULT_RANK_TOL,
};

use crate::args::{FlowArgs, ShortArgs};
use crate::error::{exit, CliError};
use crate::io::{load_psd, resolve_projection, resolve_subspace};
use crate::real::Real;
use crate::report::{
    CheckConfig, CommutatorNorms, ComparisonSection, FlowSection, InputDigest, MatrixEntries, RunReport,
    ShortcutSection, ShortingSection, Timings, ToleranceConfig,
};

/// Kernel tolerance for `K = ker P_A ∩ ker P_B`.
pub const KERNEL_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: i32,
    /// One line per reason for a nonzero exit code.
    pub diagnostics: Vec<String>,
}

fn flow_config(args: &FlowArgs, ledger: bool) -> Result<FlowConfig, CliError> {
    let cfg = FlowConfig { stop_tol: args.tol, max_iter: args.max_iter, keep_iterates: false, ledger_enabled: ledger };
    cfg.validate()?;
    Ok(cfg)
}

fn load_triple(args: &FlowArgs) -> Result<(PsdOperator, Projection, Projection), CliError> {
    let r0 = load_psd(&args.r0)?;
    let pa = resolve_projection(&args.pa, r0.dim())?;
    let pb = resolve_projection(&args.pb, r0.dim())?;
    Ok((r0, pa, pb))
}

fn digest(
    r0: &PsdOperator,
    projections: Option<(&Projection, &Projection)>,
    k: &Subspace,
) -> Result<InputDigest, CliError> {
    let commutator_norms = match projections {
        Some((pa, pb)) => Some(CommutatorNorms {
            r0_pa: Real(commutator_norm(r0.matrix(), pa.matrix())?),
            r0_pb: Real(commutator_norm(r0.matrix(), pb.matrix())?),
            pa_pb: Real(commutator_norm(pa.matrix(), pb.matrix())?),
        }),
        None => None,
    };
    Ok(InputDigest {
        dim: r0.dim(),
        r0_frobenius: Real(r0.frobenius_norm()),
        r0_trace: Real(r0.trace()),
        r0_lambda_max: Real(r0.lambda_max()),
        pa_rank: projections.map(|(pa, _)| pa.rank()),
        pb_rank: projections.map(|(_, pb)| pb.rank()),
        k_dim: k.rank(),
        commutator_norms,
    })
}

fn tolerances(cfg: Option<&FlowConfig>, rank_tol: f64, checks: Option<&CheckTolerances<f64>>) -> ToleranceConfig {
    ToleranceConfig {
        stop_tol: cfg.map(|c| Real(c.stop_tol)),
        max_iter: cfg.map(|c| c.max_iter),
        rank_tol: Real(rank_tol),
        kernel_tol: Real(KERNEL_TOL),
        clip_tol: Real(DEFAULT_CLIP_TOL),
        checks: checks.map(|t| CheckConfig {
            commuting: Real(t.commuting),
            kernel_comparison: Real(t.kernel_comparison),
            chain: Real(t.chain),
            contraction: Real(t.contraction),
            support: Real(t.support),
            fixed_point: Real(t.fixed_point),
            localization: Real(t.localization),
            end_to_end: Real(t.end_to_end),
            telescoping: Real(t.telescoping),
            energy: Real(t.energy),
        }),
    }
}

fn flow_section(trace: &FlowTrace, pa: &Projection, pb: &Projection) -> Result<FlowSection, CliError> {
    let r_inf = &trace.r_inf;
    let energy = if trace.ledger_enabled { Some(energy_report(trace)?) } else { None };
    Ok(FlowSection {
        schedule: trace.schedule.describe().to_string(),
        iterations: trace.iterate_count,
        converged: trace.converged,
        final_delta: Real(trace.final_delta()),
        r_inf: MatrixEntries::from(r_inf.matrix()),
        r_inf_trace: Real(r_inf.trace()),
        energy_residual: energy.as_ref().map(|e| Real(e.residual_norm)),
        dissipated_trace: energy.as_ref().map(|e| Real(e.dissipated_trace)),
        max_telescoping_residual: trace
            .ledger_enabled
            .then(|| Real(trace.telescoping_residuals.iter().copied().fold(0.0, f64::max))),
        fixed_point_residual_a: Real(fixed_point_residual(r_inf, pa)?),
        fixed_point_residual_b: Real(fixed_point_residual(r_inf, pb)?),
        support_residual: Real(support_residual(r_inf, pa, pb)?),
    })
}

fn timings(start: Instant) -> Timings {
    Timings { total_seconds: Real(start.elapsed().as_secs_f64()) }
}

pub fn cmd_flow(args: &FlowArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let (r0, pa, pb) = load_triple(args)?;
    let cfg = flow_config(args, args.ledger)?;
    let k = kernel_intersection(&pa, &pb, KERNEL_TOL)?;
    let trace = run_flow(&r0, &pa, &pb, &cfg)?;
    let report = RunReport {
        command: "flow".into(),
        inputs: digest(&r0, Some((&pa, &pb)), &k)?,
        tolerances: tolerances(Some(&cfg), DEFAULT_RANK_TOL, None),
        flow: Some(flow_section(&trace, &pa, &pb)?),
        shorting: None,
        comparison: None,
        timings: timings(start),
    };
    let (exit_code, diagnostics) = if trace.converged {
        (exit::OK, Vec::new())
    } else {
        (exit::NON_CONVERGENCE, vec![non_convergence(&trace)])
    };
    Ok(Outcome { report, exit_code, diagnostics })
}

fn non_convergence(trace: &FlowTrace) -> String {
    format!("flow did not converge in {} steps (last step {:e})", trace.iterate_count, trace.final_delta())
}

pub fn cmd_short(args: &ShortArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let r0 = load_psd(&args.r0)?;
    let d = r0.dim();
    let (k, projections) = match (&args.k, &args.pa, &args.pb) {
        (Some(k), None, None) => (resolve_subspace(k, d)?, None),
        (None, Some(pa), Some(pb)) => {
            let pa = resolve_projection(pa, d)?;
            let pb = resolve_projection(pb, d)?;
            (kernel_intersection(&pa, &pb, KERNEL_TOL)?, Some((pa, pb)))
        }
        _ => return Err(CliError::Validation("give either --k or both --pa and --pb".into())),
    };
    if !(args.rank_tol >= 0.0 && args.rank_tol < 1.0) {
        return Err(CliError::Validation(format!("rank_tol must lie in [0, 1), found {}", args.rank_tol)));
    }
    let shorted = shorted_intrinsic_with(&r0, &k, args.rank_tol)?;
    let report = RunReport {
        command: "short".into(),
        inputs: digest(&r0, projections.as_ref().map(|(a, b)| (a, b)), &k)?,
        tolerances: tolerances(None, args.rank_tol, None),
        flow: None,
        shorting: Some(ShortingSection {
            s_short: MatrixEntries::from(shorted.s.matrix()),
            s_schur: MatrixEntries::from(shorted.s_schur.matrix()),
            m_dim: shorted.m_subspace.rank(),
            method_discrepancy: Real(shorted.method_discrepancy),
        }),
        comparison: None,
        timings: timings(start),
    };
    Ok(Outcome { report, exit_code: exit::OK, diagnostics: Vec::new() })
}

fn comparison_section(rep: &GapReport, violations: &[String]) -> Result<ComparisonSection, CliError> {
    let g_raw = rep.shorted.p_m.matrix().sub(&rep.intrinsic.t_inf.t)?;
    Ok(ComparisonSection {
        gap_fro: Real(rep.gap_fro),
        g_fro: Real(rep.g_fro),
        g_spectrum: g_raw.eigenvalues().into_iter().map(Real).collect(),
        equality_flag: rep.equality_flag,
        gap_certified: rep.gap.is_ok(),
        localization_residual: Real(rep.localization_residual),
        range_residual: rep.gap.as_ref().ok().map(|g| Real(g.range_residual)),
        intrinsic_iterations: rep.intrinsic.iterate_count,
        intrinsic_converged: rep.intrinsic.converged,
        intrinsic_discrepancy: Real(rep.intrinsic_discrepancy),
        chain_margins: rep.chain_margins.iter().copied().map(Real).collect(),
        contraction_margins: rep.contraction_margins.iter().copied().map(Real).collect(),
        commuting: rep.shortcut.is_some(),
        shortcut: match (&rep.shortcut, rep.shortcut_discrepancy) {
            (Some(s), Some(d)) => Some(ShortcutSection { r0_pk: MatrixEntries::from(s.matrix()), discrepancy: Real(d) }),
            _ => None,
        },
        kernel_inclusion_holds: rep.kernel.holds,
        kernel_witness: rep.kernel.witness.as_ref().map(|w| w.iter().copied().map(Real).collect()),
        invariant_violations: violations.to_vec(),
    })
}

/// Runs the full comparison pipeline on already-loaded inputs.
pub fn compare_triple(
    r0: &PsdOperator,
    pa: &Projection,
    pb: &Projection,
    cfg: &FlowConfig,
) -> Result<(GapReport, Vec<String>), CliError> {
    let rep = compare_with(r0, pa, pb, cfg, CheckTolerances::default())?;
    let violations = rep.violations().iter().map(ToString::to_string).collect();
    Ok((rep, violations))
}

pub fn cmd_compare(args: &FlowArgs) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let (r0, pa, pb) = load_triple(args)?;
    let cfg = flow_config(args, true)?;
    let (rep, violations) = compare_triple(&r0, &pa, &pb, &cfg)?;
    let report = RunReport {
        command: "compare".into(),
        inputs: digest(&r0, Some((&pa, &pb)), &rep.k)?,
        tolerances: tolerances(Some(&cfg), rep.tolerances.rank, Some(&rep.tolerances)),
        flow: Some(flow_section(&rep.flow, &pa, &pb)?),
        shorting: Some(ShortingSection {
            s_short: MatrixEntries::from(rep.shorted.s.matrix()),
            s_schur: MatrixEntries::from(rep.shorted.s_schur.matrix()),
            m_dim: rep.shorted.m_subspace.rank(),
            method_discrepancy: Real(rep.shorted.method_discrepancy),
        }),
        comparison: Some(comparison_section(&rep, &violations)?),
        timings: timings(start),
    };
    let (exit_code, diagnostics) = if !violations.is_empty() {
        (exit::INVARIANT_VIOLATION, violations.iter().map(|v| format!("invariant violated: {v}")).collect())
    } else if !rep.converged() {
        let mut d = vec![non_convergence(&rep.flow)];
        if !rep.intrinsic.converged {
            d.push(format!("intrinsic flow did not converge in {} steps", rep.intrinsic.iterate_count));
        }
        (exit::NON_CONVERGENCE, d)
    } else {
        (exit::OK, Vec::new())
    };
    Ok(Outcome { report, exit_code, diagnostics })
}
