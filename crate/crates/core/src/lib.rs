//! Alternating weighted residual flows on positive semidefinite operators.
//!
//! The residual map `Φ_P(R) = R^{1/2} (I - P) R^{1/2}` is applied alternately
//! with two orthogonal projections `P_B, P_A`. The iteration decreases in the
//! Loewner order and settles on an operator supported in
//! `K = ker P_A ∩ ker P_B`. This crate runs that flow, computes the shorted
//! operator `R_0|_K` two independent ways, and measures the gap between the
//! two through the intrinsic contraction representation on `ran R_0^{1/2}`.
//!
//! All routines are generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the default
//! tolerances are calibrated for.

pub mod comparison;
pub mod dense;
pub mod eigen;
pub mod error;
pub mod factorization;
pub mod flow;
pub mod psd;
pub mod scalar;
pub mod shorting;

pub use comparison::{compare, compare_with, CheckTolerances, Violation};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub use factorization::{
    commuting_shortcut, douglas_factor, gap, intrinsic_contraction, kernel_comparison, psi_map, run_intrinsic_flow,
};
pub use flow::{
    dissipation_term, energy_report, fixed_point_residual, residual_map, run_flow, step_projection, support_residual,
    Schedule,
};
pub use psd::{
    commutator_norm, kernel, kernel_intersection, loewner_leq, pinv_psd, proj_from_span, psd_sqrt, spectral_decompose,
    support_projection, DEFAULT_CLIP_TOL, DEFAULT_RANK_TOL,
};
pub use shorting::{block_decompose, shorted_intrinsic, shorted_schur, subspace_m, variational_value};

pub type Mat = dense::Mat<f64>;
pub type SymmetricMatrix = psd::SymmetricMatrix<f64>;
pub type PsdOperator = psd::PsdOperator<f64>;
pub type Projection = psd::Projection<f64>;
pub type Subspace = psd::Subspace<f64>;
pub type LoewnerComparison = psd::LoewnerComparison<f64>;
pub type FlowConfig = flow::FlowConfig<f64>;
pub type FlowTrace = flow::FlowTrace<f64>;
pub type EnergyReport = flow::EnergyReport<f64>;
pub type BlockDecomposition = shorting::BlockDecomposition<f64>;
pub type ShortedResult = shorting::ShortedResult<f64>;
pub type DouglasFactor = factorization::DouglasFactor<f64>;
pub type OperatorRange = factorization::OperatorRange<f64>;
pub type IntrinsicContraction = factorization::IntrinsicContraction<f64>;
pub type IntrinsicTrace = factorization::IntrinsicTrace<f64>;
pub type GapResult = factorization::GapResult<f64>;
pub type KernelComparison = factorization::KernelComparison<f64>;
pub type GapReport = comparison::GapReport<f64>;
