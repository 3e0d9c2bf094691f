//! File formats: signals and TF grids as CSV, heatmaps as binary PPM,
//! matrices and programs as JSON.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! signal written here and read back is bit-identical.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::engine::{Axis, DiscreteSignal, Grid1D, TfGrid};
use crate::error::{Error, Result};
use crate::linalg::{Mat, MatrixJson};
use crate::program::MetaplecticProgram;

/// Sidecar of a signal CSV: same path with a `.json` extension.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad {what} value '{s}'")))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn read_signal(path: &Path) -> Result<DiscreteSignal> {
    let side = sidecar_path(path);
    let grid: Grid1D = read_json(&side)?;
    let grid = Grid1D::new(grid.n, grid.t)?;
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = rdr.headers().map_err(csv_err)?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["index", "re", "im"] {
        return Err(Error::Parse(format!("{}: expected header index,re,im", path.display())));
    }
    let mut values = vec![None; grid.n];
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let idx: usize = rec[0].trim().parse().map_err(|_| Error::Parse(format!("bad index '{}'", &rec[0])))?;
        if idx >= grid.n {
            return Err(Error::GridMismatch(format!("index {idx} outside N = {}", grid.n)));
        }
        values[idx] = Some(Complex64::new(parse_f64(&rec[1], "re")?, parse_f64(&rec[2], "im")?));
    }
    let values: Option<Vec<Complex64>> = values.into_iter().collect();
    let values = values.ok_or_else(|| Error::GridMismatch(format!("{}: missing samples", path.display())))?;
    DiscreteSignal::new(grid, values)
}

pub fn write_signal(path: &Path, s: &DiscreteSignal) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["index", "re", "im"]).map_err(csv_err)?;
    for (i, v) in s.values.iter().enumerate() {
        w.write_record([i.to_string(), v.re.to_string(), v.im.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    write_json(&sidecar_path(path), &s.grid)
}

#[derive(Serialize, Deserialize)]
struct GridMeta {
    label: String,
    rows: usize,
    cols: usize,
    axis0_step: f64,
    axis1_step: f64,
    params: std::collections::BTreeMap<String, f64>,
}

/// Files written for a TF grid named `stem` in `dir`.
pub struct GridFiles {
    pub re: PathBuf,
    pub im: PathBuf,
    pub axis0: PathBuf,
    pub axis1: PathBuf,
    pub meta: PathBuf,
}

impl GridFiles {
    pub fn new(dir: &Path, stem: &str) -> Self {
        let p = |s: &str| dir.join(format!("{stem}_{s}"));
        GridFiles { re: p("re.csv"), im: p("im.csv"), axis0: p("axis0.csv"), axis1: p("axis1.csv"), meta: p("meta.json") }
    }
}

fn write_matrix_csv(path: &Path, g: &TfGrid, part: impl Fn(Complex64) -> f64) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    for i in 0..g.rows() {
        w.write_record(g.row(i).iter().map(|&v| part(v).to_string())).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn read_matrix_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path).map_err(csv_err)?;
    r.records()
        .map(|rec| rec.map_err(csv_err)?.iter().map(|s| parse_f64(s, "grid")).collect())
        .collect()
}

fn write_axis(path: &Path, a: &Axis) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["index", "coord"]).map_err(csv_err)?;
    for i in 0..a.n {
        w.write_record([i.to_string(), a.coord(i).to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_tf_grid(dir: &Path, stem: &str, g: &TfGrid) -> Result<GridFiles> {
    fs::create_dir_all(dir)?;
    let files = GridFiles::new(dir, stem);
    write_matrix_csv(&files.re, g, |v| v.re)?;
    write_matrix_csv(&files.im, g, |v| v.im)?;
    write_axis(&files.axis0, &g.axes[0])?;
    write_axis(&files.axis1, &g.axes[1])?;
    let meta = GridMeta {
        label: g.label.clone(),
        rows: g.rows(),
        cols: g.cols(),
        axis0_step: g.axes[0].step,
        axis1_step: g.axes[1].step,
        params: g.params.clone(),
    };
    write_json(&files.meta, &meta)?;
    Ok(files)
}

/// Reads a grid written by [`write_tf_grid`]; symbols enter the quantizers this way.
pub fn read_tf_grid(dir: &Path, stem: &str) -> Result<TfGrid> {
    let files = GridFiles::new(dir, stem);
    let meta: GridMeta = read_json(&files.meta)?;
    let re = read_matrix_csv(&files.re)?;
    let im = read_matrix_csv(&files.im)?;
    if re.len() != meta.rows || im.len() != meta.rows {
        return Err(Error::GridMismatch(format!("expected {} rows", meta.rows)));
    }
    let mut values = Vec::with_capacity(meta.rows * meta.cols);
    for (a, b) in re.iter().zip(&im) {
        if a.len() != meta.cols || b.len() != meta.cols {
            return Err(Error::GridMismatch(format!("expected {} columns", meta.cols)));
        }
        values.extend(a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)));
    }
    let axes = [Axis { n: meta.rows, step: meta.axis0_step }, Axis { n: meta.cols, step: meta.axis1_step }];
    let mut g = TfGrid::new(axes, values)?.labeled(&meta.label);
    g.params = meta.params;
    Ok(g)
}

/// Binary PPM heatmap of |value|: rows of the image run along axis 0.
pub fn write_ppm(path: &Path, g: &TfGrid) -> Result<()> {
    let max = g.max_abs();
    let mut buf = Vec::with_capacity(g.values.len() * 3 + 128);
    write!(
        buf,
        "P6\n# linear grayscale of |value| over [0, {max:e}], black = 0\n{} {}\n255\n",
        g.cols(),
        g.rows()
    )?;
    for v in &g.values {
        let level = if max > 0.0 { (v.norm() / max * 255.0).round() as u8 } else { 0 };
        buf.extend_from_slice(&[level; 3]);
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, v: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Reads `{"d": .., "rows": [[..], ..]}` as a square matrix; shape and
/// symplecticity are checked by the consumer.
pub fn read_matrix(path: &Path) -> Result<Mat> {
    read_json::<MatrixJson>(path)?.to_matrix()
}

pub fn read_program(path: &Path) -> Result<MetaplecticProgram> {
    let p: MetaplecticProgram = read_json(path)?;
    p.validate()?;
    Ok(p)
}
