//! File formats, reports, subcommands and the ensemble runner behind the
//! `wrflow` binary.

pub mod args;
pub mod commands;
pub mod ensemble;
pub mod error;
pub mod io;
pub mod real;
pub mod report;

pub use commands::{cmd_compare, cmd_flow, cmd_short, Outcome};
pub use ensemble::{cmd_ensemble, EnsembleRow};
pub use error::{exit, CliError};
pub use io::{parse_matrix_file, resolve_projection, MatrixFile, MatrixKind, ProjectionSpec};
pub use real::Real;
pub use report::{emit_report, parse_report, RunReport};
