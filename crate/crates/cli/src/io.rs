//! Matrix files and projection arguments.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use wrflow::{proj_from_span, Mat, Projection, PsdOperator, Subspace, SymmetricMatrix};

use crate::error::CliError;
use crate::real::Real;

/// Allowed asymmetry `|a_ij - a_ji|` relative to `1 + max |a|`.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Psd,
    Projection,
    Symmetric,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::Psd => "psd",
            MatrixKind::Projection => "projection",
            MatrixKind::Symmetric => "symmetric",
        })
    }
}

/// On-disk matrix: `{"dim": d, "entries": [row-major], "kind": ...}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<Real>,
    pub kind: MatrixKind,
}

impl MatrixFile {
    pub fn new(kind: MatrixKind, m: &SymmetricMatrix) -> Self {
        Self { dim: m.dim(), entries: m.entries().iter().copied().map(Real).collect(), kind }
    }

    /// Checks the shape and the kind invariant.
    pub fn validate(&self) -> Result<SymmetricMatrix, CliError> {
        let d = self.dim;
        if self.entries.len() != d * d {
            return Err(CliError::Validation(format!(
                "entries: expected dim^2 = {} values, found {}",
                d * d,
                self.entries.len()
            )));
        }
        let raw: Vec<f64> = self.entries.iter().map(|r| r.0).collect();
        if let Some(i) = raw.iter().position(|x| !x.is_finite()) {
            return Err(CliError::Validation(format!("entries: non-finite value at ({}, {})", i / d, i % d)));
        }
        let scale = 1.0 + raw.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for i in 0..d {
            for j in 0..i {
                let gap = (raw[i * d + j] - raw[j * d + i]).abs();
                if gap > SYMMETRY_TOL * scale {
                    return Err(CliError::Validation(format!(
                        "symmetry: entries ({i}, {j}) and ({j}, {i}) differ by {gap:e}"
                    )));
                }
            }
        }
        let m = SymmetricMatrix::new(Mat::from_row_major(d, d, raw))?;
        match self.kind {
            MatrixKind::Symmetric => {}
            MatrixKind::Psd => {
                PsdOperator::new(m.clone()).map_err(|e| CliError::Validation(format!("kind psd: {e}")))?;
            }
            MatrixKind::Projection => {
                Projection::new(m.clone()).map_err(|e| CliError::Validation(format!("kind projection: {e}")))?;
            }
        }
        Ok(m)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Reads and validates a matrix file.
pub fn parse_matrix_file(path: &Path) -> Result<(MatrixKind, SymmetricMatrix), CliError> {
    let text = read(path)?;
    let file: MatrixFile =
        serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), message: e.to_string() })?;
    let m = file.validate().map_err(|e| e.at(path))?;
    Ok((file.kind, m))
}

pub fn write_matrix_file(path: &Path, file: &MatrixFile) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(file).expect("matrix file serializes");
    fs::write(path, text + "\n").map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Loads `R_0`; the file must declare kind `psd`.
pub fn load_psd(path: &Path) -> Result<PsdOperator, CliError> {
    let (kind, m) = parse_matrix_file(path)?;
    if kind != MatrixKind::Psd {
        return Err(CliError::Validation(format!("{}: kind must be psd, found {kind}", path.display())));
    }
    Ok(PsdOperator::new(m)?)
}

/// Source of an orthogonal projection on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum ProjectionSpec {
    File(PathBuf),
    /// Projection onto the span of the listed vectors.
    Span(Vec<Vec<f64>>),
    Zero,
    Identity,
}

impl FromStr for ProjectionSpec {
    type Err = CliError;

    /// `zero`, `identity`, `span:1,0;0,1` or a file path.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "zero" => Ok(Self::Zero),
            "identity" => Ok(Self::Identity),
            t => match t.strip_prefix("span:") {
                Some(body) => parse_span(body).map(Self::Span),
                None if t.is_empty() => Err(CliError::Validation("empty projection spec".into())),
                None => Ok(Self::File(PathBuf::from(t))),
            },
        }
    }
}

fn parse_span(body: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let body = body.trim();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    body.split(';')
        .map(|v| {
            v.split(',')
                .map(|x| {
                    let x = x.trim();
                    x.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| CliError::Validation(format!("span: '{x}' is not a finite number")))
                })
                .collect()
        })
        .collect()
}

pub fn resolve_projection(spec: &ProjectionSpec, dim: usize) -> Result<Projection, CliError> {
    match spec {
        ProjectionSpec::Zero => Ok(Projection::zero(dim)),
        ProjectionSpec::Identity => Ok(Projection::identity(dim)),
        ProjectionSpec::Span(vectors) => {
            if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
                return Err(CliError::Validation(format!("span: vector of length {} in dimension {dim}", v.len())));
            }
            Ok(proj_from_span(dim, vectors)?)
        }
        ProjectionSpec::File(path) => {
            let (_, m) = parse_matrix_file(path)?;
            if m.dim() != dim {
                return Err(CliError::Validation(format!(
                    "{}: projection has dimension {}, expected {dim}",
                    path.display(),
                    m.dim()
                )));
            }
            Projection::new(m).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
        }
    }
}

/// The subspace `K` given directly: the range of the resolved projection.
pub fn resolve_subspace(spec: &ProjectionSpec, dim: usize) -> Result<Subspace, CliError> {
    Ok(resolve_projection(spec, dim)?.range())
}
