//! CSV and JSON serialization of data sets and paths.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! value read back from a file is bit-identical to the one written.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path as FsPath;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::active_set::ActiveSet;
use crate::error::{Error, Result};
use crate::path_engine::{Driver, Path, ProblemKind, Termination};

fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Writes a matrix with header `prefix1, prefix2, …`.
pub fn write_matrix_csv(path: &FsPath, m: ArrayView2<'_, f64>, prefix: &str) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let header: Vec<String> = (1..=m.ncols()).map(|j| format!("{prefix}{j}")).collect();
    w.write_record(&header)?;
    for row in m.rows() {
        w.write_record(row.iter().map(|&v| fmt_f64(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a vector as a single column named `name`.
pub fn write_vector_csv(path: &FsPath, v: ArrayView1<'_, f64>, name: &str) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([name])?;
    for &x in v {
        w.write_record([fmt_f64(x)])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a numeric CSV with a header row.
pub fn read_matrix_csv(path: &FsPath) -> Result<Array2<f64>> {
    let mut r = csv::Reader::from_path(path)?;
    let ncols = r.headers()?.len();
    let mut data = Vec::new();
    let mut nrows = 0;
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != ncols {
            return Err(Error::dims(format!(
                "{}: row {} has {} fields, header has {ncols}",
                path.display(),
                i + 1,
                rec.len()
            )));
        }
        for field in rec.iter() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::invalid(format!(
                    "{}: row {}: '{field}' is not a number",
                    path.display(),
                    i + 1
                ))
            })?;
            data.push(v);
        }
        nrows += 1;
    }
    Array2::from_shape_vec((nrows, ncols), data).map_err(|e| Error::dims(e.to_string()))
}

pub fn read_vector_csv(path: &FsPath) -> Result<Array1<f64>> {
    let m = read_matrix_csv(path)?;
    if m.ncols() != 1 {
        return Err(Error::dims(format!(
            "{}: expected a single column, found {}",
            path.display(),
            m.ncols()
        )));
    }
    Ok(m.column(0).to_owned())
}

pub fn write_labels_csv(path: &FsPath, labels: &[usize]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["label"])?;
    for l in labels {
        w.write_record([l.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &FsPath, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &FsPath) -> Result<T> {
    let f = File::open(path)?;
    Ok(serde_json::from_reader(std::io::BufReader::new(f))?)
}

/// How the regularization levels of a path were produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ScheduleMeta {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub grid_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spacing: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_inner: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    pub problem: ProblemKind,
    pub driver: Driver,
    pub schedule: ScheduleMeta,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord<'a> {
    pub k: usize,
    pub gamma: f64,
    pub sparsity: usize,
    pub active_set: &'a ActiveSet,
    pub rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PathRecord<'a> {
    pub meta: &'a PathMeta,
    pub points: Vec<PointRecord<'a>>,
    pub terminated: Termination,
}

impl<'a> PathRecord<'a> {
    /// `full` includes every z iterate.
    pub fn new(path: &'a Path, meta: &'a PathMeta, full: bool) -> Self {
        let points = path
            .points
            .iter()
            .map(|p| PointRecord {
                k: p.k,
                gamma: p.gamma,
                sparsity: p.sparsity,
                active_set: &p.active_set,
                rounds: p.rounds,
                converged: (!p.converged).then_some(false),
                z: full.then(|| p.z.rows().into_iter().map(|r| r.to_vec()).collect()),
            })
            .collect();
        PathRecord {
            meta,
            points,
            terminated: path.terminated,
        }
    }
}

pub fn write_path_json(path: &FsPath, p: &Path, meta: &PathMeta, full: bool) -> Result<()> {
    write_json(path, &PathRecord::new(p, meta, full))
}

/// `k, gamma, sparsity, active_set_hash, rounds`, one row per point.
pub fn write_path_csv<W: Write>(out: W, p: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "gamma", "sparsity", "active_set_hash", "rounds"])?;
    for pt in &p.points {
        w.write_record([
            pt.k.to_string(),
            fmt_f64(pt.gamma),
            pt.sparsity.to_string(),
            format!("{:016x}", pt.active_set.hash64()),
            pt.rounds.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_path_csv_file(path: &FsPath, p: &Path) -> Result<()> {
    write_path_csv(BufWriter::new(File::create(path)?), p)
}
