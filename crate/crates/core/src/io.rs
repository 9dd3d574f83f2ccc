//! File formats: headerless numeric CSV (no quoting) for matrices and vectors, JSON job
//! files describing recovery instances, and JSON support patterns.
//!
//! Indices in files are one-based; the library works with zero-based indices.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::conditions::SupportPattern;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::solvers::RecoveryInstance;

fn parse_error(path: &Path, location: String, message: String) -> Error {
    Error::Parse {
        source_name: path.display().to_string(),
        location,
        message,
    }
}

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let row = content
            .split(',')
            .enumerate()
            .map(|(j, field)| {
                let field = field.trim();
                let at = || format!("line {line}, field {}", j + 1);
                let v: f64 = field
                    .parse()
                    .map_err(|_| parse_error(path, at(), format!("not a number: {field:?}")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(parse_error(path, at(), format!("non-finite value {field:?}")))
                }
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(parse_error(
                    path,
                    format!("line {line}"),
                    format!("expected {first} fields, found {}", row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(path, "line 1".into(), "no data rows".into()));
    }
    Ok(rows)
}

/// Reads a dense matrix: one row per line, comma-separated, no header.
pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    DenseMatrix::from_rows(&read_rows(path.as_ref())?)
}

/// Reads a vector stored either as a single column or as a single row.
pub fn read_vector_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let rows = read_rows(path)?;
    match (rows.len(), rows[0].len()) {
        (1, _) => Ok(rows.into_iter().next().unwrap_or_default()),
        (_, 1) => Ok(rows.into_iter().map(|r| r[0]).collect()),
        (r, c) => Err(parse_error(
            path,
            "line 1".into(),
            format!("expected a single row or column, found {r}x{c}"),
        )),
    }
}

fn float(v: f64) -> String {
    // `{:?}` prints the shortest representation that round-trips.
    format!("{v:?}")
}

pub fn write_matrix_csv(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for i in 0..a.rows() {
        w.write_record(a.row(i).iter().map(|v| float(*v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a vector as a single column.
pub fn write_vector_csv(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for x in v {
        w.write_record([float(*x)])?;
    }
    w.flush()?;
    Ok(())
}

/// Recovery problem on disk. Paths are resolved relative to the job file.
/// When `y` is omitted it is computed as `A x_true`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceJob {
    pub matrix: PathBuf,
    #[serde(default)]
    pub y: Option<PathBuf>,
    #[serde(default)]
    pub x_true: Option<PathBuf>,
    pub p: f64,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| {
        parse_error(
            path,
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Loads the instance described by a job file.
pub fn load_instance(job_path: impl AsRef<Path>) -> Result<RecoveryInstance> {
    let job_path = job_path.as_ref();
    let job: InstanceJob = read_json(job_path)?;
    let base = job_path.parent().unwrap_or(Path::new("."));
    let a = read_matrix_csv(base.join(&job.matrix))?;
    let x_true = job.x_true.as_ref().map(|p| read_vector_csv(base.join(p))).transpose()?;
    let y = match (&job.y, &x_true) {
        (Some(p), _) => read_vector_csv(base.join(p))?,
        (None, Some(x)) => a.matvec(x)?,
        (None, None) => {
            return Err(parse_error(job_path, "top level".into(), "job needs `y` or `x_true`".into()));
        }
    };
    RecoveryInstance::new(a, y, job.p, x_true)
}

/// Support pattern file with one-based indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternFile {
    pub support: Vec<usize>,
    #[serde(default)]
    pub signs: Option<Vec<i8>>,
}

impl PatternFile {
    /// Zero-based pattern; missing signs mean all positive.
    pub fn to_pattern(&self) -> Result<SupportPattern> {
        let support = one_based_to_zero(&self.support)?;
        let signs = self.signs.clone().unwrap_or_else(|| vec![1; support.len()]);
        SupportPattern::new(support, signs)
    }
}

pub fn read_pattern_json(path: impl AsRef<Path>) -> Result<SupportPattern> {
    let path = path.as_ref();
    let file: PatternFile = read_json(path)?;
    file.to_pattern()
        .map_err(|e| parse_error(path, "support".into(), e.to_string()))
}

/// Converts sorted one-based indices to zero-based ones.
pub fn one_based_to_zero(idx: &[usize]) -> Result<Vec<usize>> {
    idx.iter()
        .map(|&i| {
            i.checked_sub(1)
                .ok_or_else(|| Error::InvalidArgument("indices are one-based; 0 is not allowed".into()))
        })
        .collect()
}

/// Parses a comma-separated list of one-based indices such as `1,2,5`.
pub fn parse_index_list(text: &str) -> Result<Vec<usize>> {
    let idx = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad index {s:?} in {text:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut zero = one_based_to_zero(&idx)?;
    zero.sort_unstable();
    zero.dedup();
    Ok(zero)
}
