//! Structured run reports.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use wrflow::SymmetricMatrix;

use crate::error::CliError;
use crate::real::Real;

/// Row-major dense matrix in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntries {
    pub dim: usize,
    pub entries: Vec<Real>,
}

impl From<&SymmetricMatrix> for MatrixEntries {
    fn from(m: &SymmetricMatrix) -> Self {
        Self { dim: m.dim(), entries: m.entries().iter().copied().map(Real).collect() }
    }
}

impl MatrixEntries {
    pub fn to_matrix(&self) -> Result<SymmetricMatrix, CliError> {
        Ok(SymmetricMatrix::from_row_major(self.dim, self.entries.iter().map(|r| r.0).collect())?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorNorms {
    pub r0_pa: Real,
    pub r0_pb: Real,
    pub pa_pb: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub dim: usize,
    pub r0_frobenius: Real,
    pub r0_trace: Real,
    pub r0_lambda_max: Real,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pa_rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pb_rank: Option<usize>,
    pub k_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commutator_norms: Option<CommutatorNorms>,
}

/// Tolerances in force for the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_tol: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    pub rank_tol: Real,
    pub kernel_tol: Real,
    pub clip_tol: Real,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<CheckConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub commuting: Real,
    pub kernel_comparison: Real,
    pub chain: Real,
    pub contraction: Real,
    pub support: Real,
    pub fixed_point: Real,
    pub localization: Real,
    pub end_to_end: Real,
    pub telescoping: Real,
    pub energy: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSection {
    pub schedule: String,
    pub iterations: usize,
    pub converged: bool,
    pub final_delta: Real,
    pub r_inf: MatrixEntries,
    pub r_inf_trace: Real,
    /// `|R_0 - R_final - Σ D_n|_F`; absent without the ledger.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_residual: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dissipated_trace: Option<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_telescoping_residual: Option<Real>,
    pub fixed_point_residual_a: Real,
    pub fixed_point_residual_b: Real,
    pub support_residual: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortingSection {
    pub s_short: MatrixEntries,
    pub s_schur: MatrixEntries,
    pub m_dim: usize,
    pub method_discrepancy: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortcutSection {
    pub r0_pk: MatrixEntries,
    /// `|R_0 P_K - R_∞|_F`.
    pub discrepancy: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSection {
    /// `|S - R_∞|_F`.
    pub gap_fro: Real,
    /// `|P_M - T_∞|_F`.
    pub g_fro: Real,
    /// Eigenvalues of `G = P_M - T_∞`, descending.
    pub g_spectrum: Vec<Real>,
    pub equality_flag: bool,
    /// Whether `G` and `S - R_∞` certified as positive.
    pub gap_certified: bool,
    pub localization_residual: Real,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range_residual: Option<Real>,
    pub intrinsic_iterations: usize,
    pub intrinsic_converged: bool,
    /// `|R_0^{1/2} T_∞ R_0^{1/2} - R_∞|_F`.
    pub intrinsic_discrepancy: Real,
    /// Loewner margins of `0 ≤ R_∞`, `R_∞ ≤ S`, `S ≤ R_0`.
    pub chain_margins: Vec<Real>,
    /// Loewner margins of `0 ≤ T_∞`, `T_∞ ≤ P_M`.
    pub contraction_margins: Vec<Real>,
    pub commuting: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shortcut: Option<ShortcutSection>,
    pub kernel_inclusion_holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_witness: Option<Vec<Real>>,
    pub invariant_violations: Vec<String>,
}

/// Wall-clock seconds per phase; the only non-deterministic part of a report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_seconds: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: InputDigest,
    pub tolerances: ToleranceConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow: Option<FlowSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shorting: Option<ShortingSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonSection>,
    pub timings: Timings,
}

impl RunReport {
    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_text(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// The report with timings zeroed, for reproducibility comparisons.
    pub fn without_timings(&self) -> Self {
        Self { timings: Timings::default(), ..self.clone() }
    }
}

pub fn emit_report(report: &RunReport, path: &Path) -> Result<(), CliError> {
    fs::write(path, report.to_text()).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn parse_report(path: &Path) -> Result<RunReport, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    RunReport::from_text(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })
}
