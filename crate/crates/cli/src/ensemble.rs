//! Seeded random ensembles of `(R_0, P_A, P_B)`.
//!
//! Every trial draws from its own ChaCha8 stream keyed by `(seed, trial)`,
//! so a row depends only on `(seed, dim, trial)` and not on scheduling.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wrflow::eigen::orthonormal_span;
use wrflow::{proj_from_span, FlowConfig, Mat, Projection, PsdOperator, SymmetricMatrix};

use crate::args::EnsembleArgs;
use crate::commands::compare_triple;
use crate::error::CliError;

#[derive(Clone, Debug)]
pub struct Trial {
    pub r0: PsdOperator,
    pub pa: Projection,
    pub pb: Projection,
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn gaussian_vectors(rng: &mut ChaCha8Rng, count: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..count).map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect()).collect()
}

/// Projection onto the span of `rank ~ U{0..dim}` Gaussian vectors.
fn gaussian_frame_projection(rng: &mut ChaCha8Rng, dim: usize) -> Result<Projection, wrflow::Error> {
    let rank = rng.random_range(0..=dim);
    proj_from_span(dim, &gaussian_vectors(rng, rank, dim))
}

/// `R_0 = AᵀA` with standard normal `A`, and two Gaussian-frame projections.
pub fn sample_generic(rng: &mut ChaCha8Rng, dim: usize) -> Result<Trial, wrflow::Error> {
    let a = Mat::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let r0 = PsdOperator::new(SymmetricMatrix::new(a.tr_matmul(&a))?)?;
    let pa = gaussian_frame_projection(rng, dim)?;
    let pb = gaussian_frame_projection(rng, dim)?;
    Ok(Trial { r0, pa, pb })
}

/// `R_0`, `P_A`, `P_B` diagonal in one random orthonormal basis: `R_0` has
/// chi-square(`dim`) eigenvalues, the projections are spanned by random
/// subsets of the basis with uniform rank.
pub fn sample_commuting(rng: &mut ChaCha8Rng, dim: usize) -> Result<Trial, wrflow::Error> {
    let basis = loop {
        let q = orthonormal_span(dim, &gaussian_vectors(rng, dim, dim), 1e-8);
        if q.ncols() == dim {
            break q;
        }
    };
    let chi = ChiSquared::new(dim as f64).expect("dim is positive");
    let values: Vec<f64> = (0..dim).map(|_| rng.sample(chi)).collect();
    let scaled = Mat::from_fn(dim, dim, |i, j| basis[(i, j)] * values[j]);
    let r0 = PsdOperator::new(SymmetricMatrix::new(&scaled * &basis.transpose())?)?;
    let coordinate = |rng: &mut ChaCha8Rng| {
        let rank = rng.random_range(0..=dim);
        let mut idx: Vec<usize> = (0..dim).collect();
        idx.shuffle(rng);
        let cols: Vec<Vec<f64>> = idx[..rank].iter().map(|&j| basis.column(j)).collect();
        proj_from_span(dim, &cols)
    };
    let pa = coordinate(rng)?;
    let pb = coordinate(rng)?;
    Ok(Trial { r0, pa, pb })
}

pub fn sample_trial(seed: u64, dim: usize, trial: u64, commuting: bool) -> Result<Trial, wrflow::Error> {
    let mut rng = trial_rng(seed, trial);
    if commuting {
        sample_commuting(&mut rng, dim)
    } else {
        sample_generic(&mut rng, dim)
    }
}

/// One CSV row. Result columns are empty when the trial failed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleRow {
    pub seed: u64,
    pub dim: usize,
    pub trial: u64,
    pub commutator_r0_pa: Option<f64>,
    pub commutator_r0_pb: Option<f64>,
    pub commutator_pa_pb: Option<f64>,
    pub rank_a: Option<usize>,
    pub rank_b: Option<usize>,
    pub k_dim: Option<usize>,
    pub m_dim: Option<usize>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub gap_fro: Option<f64>,
    pub g_fro: Option<f64>,
    pub dissipated_trace: Option<f64>,
    pub surviving_trace: Option<f64>,
    pub localization_residual: Option<f64>,
    pub equality_flag: Option<bool>,
    /// `;`-separated names of violated invariants.
    pub violations: String,
    pub error: String,
}

impl EnsembleRow {
    fn empty(seed: u64, dim: usize, trial: u64) -> Self {
        Self {
            seed,
            dim,
            trial,
            commutator_r0_pa: None,
            commutator_r0_pb: None,
            commutator_pa_pb: None,
            rank_a: None,
            rank_b: None,
            k_dim: None,
            m_dim: None,
            iterations: None,
            converged: None,
            gap_fro: None,
            g_fro: None,
            dissipated_trace: None,
            surviving_trace: None,
            localization_residual: None,
            equality_flag: None,
            violations: String::new(),
            error: String::new(),
        }
    }
}

pub fn run_trial(seed: u64, dim: usize, trial: u64, commuting: bool, cfg: &FlowConfig) -> EnsembleRow {
    let mut row = EnsembleRow::empty(seed, dim, trial);
    let t = match sample_trial(seed, dim, trial, commuting) {
        Ok(t) => t,
        Err(e) => {
            row.error = format!("sampling: {e}");
            return row;
        }
    };
    row.rank_a = Some(t.pa.rank());
    row.rank_b = Some(t.pb.rank());
    match compare_triple(&t.r0, &t.pa, &t.pb, cfg) {
        Ok((rep, _)) => {
            let [c0, c1, c2] = rep.commutators;
            row.commutator_r0_pa = Some(c0);
            row.commutator_r0_pb = Some(c1);
            row.commutator_pa_pb = Some(c2);
            row.k_dim = Some(rep.k.rank());
            row.m_dim = Some(rep.shorted.m_subspace.rank());
            row.iterations = Some(rep.flow.iterate_count);
            row.converged = Some(rep.converged());
            row.gap_fro = Some(rep.gap_fro);
            row.g_fro = Some(rep.g_fro);
            row.dissipated_trace = Some(rep.energy.dissipated_trace);
            row.surviving_trace = Some(rep.energy.surviving_trace);
            row.localization_residual = Some(rep.localization_residual);
            row.equality_flag = Some(rep.equality_flag);
            row.violations = rep.violations().iter().map(|v| v.invariant).collect::<Vec<_>>().join(";");
        }
        Err(e) => row.error = e.to_string(),
    }
    row
}

pub fn cmd_ensemble(args: &EnsembleArgs) -> Result<Vec<EnsembleRow>, CliError> {
    if args.dim == 0 {
        return Err(CliError::Validation("dim must be at least 1".into()));
    }
    if args.jobs == 0 {
        return Err(CliError::Validation("jobs must be at least 1".into()));
    }
    let cfg = FlowConfig { stop_tol: args.tol, max_iter: args.max_iter, ..FlowConfig::default() };
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    let count = args.count as u64;
    // indexed collect keeps trial order regardless of scheduling
    Ok(pool.install(|| {
        (0..count).into_par_iter().map(|t| run_trial(args.seed, args.dim, t, args.commuting, &cfg)).collect()
    }))
}

/// CSV header, in field order of [`EnsembleRow`].
pub const HEADER: [&str; 20] = [
    "seed",
    "dim",
    "trial",
    "commutator_r0_pa",
    "commutator_r0_pb",
    "commutator_pa_pb",
    "rank_a",
    "rank_b",
    "k_dim",
    "m_dim",
    "iterations",
    "converged",
    "gap_fro",
    "g_fro",
    "dissipated_trace",
    "surviving_trace",
    "localization_residual",
    "equality_flag",
    "violations",
    "error",
];

pub fn write_rows<W: Write>(rows: &[EnsembleRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: std::io::Read>(input: R) -> Result<Vec<EnsembleRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
