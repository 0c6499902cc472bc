//! CSV persistence. Floats are written with 17 significant digits so every
//! value parses back to the identical `f64`.

use std::fs;
use std::path::{Path, PathBuf};

use mipt_core::scaling::CollapsedPoint;
use mipt_core::EntropyCurve;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const CURVE_HEADER: [&str; 7] =
    ["L", "p", "mean_entropy_nats", "std_dev", "std_err", "n_traj", "master_seed"];
pub const PLANE_HEADER: [&str; 9] =
    ["idx", "e_p", "g_t", "c1", "c2", "c3", "p", "mean_entropy_nats", "std_err"];
pub const PLANE_FIT_HEADER: [&str; 4] = ["p_c", "p_c_err", "nu", "nu_err"];
pub const COLLAPSED_HEADER: [&str; 5] = ["L", "p", "x", "y", "std_err"];
pub const ANALYTIC_HEADER: [&str; 4] = ["N", "t", "p", "entropy_nats"];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn curve_file_name(l: usize) -> String {
    format!("curve_L{l:02}.csv")
}

fn writer(path: &Path) -> CliResult<csv::Writer<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    csv::Writer::from_path(path).map_err(|e| CliError::parse(path, e))
}

fn write_rows<I, R>(path: &Path, header: &[&str], rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    // write to a sibling file first so readers never see a torn table
    let tmp = path.with_extension("csv.partial");
    let mut w = writer(&tmp)?;
    w.write_record(header).map_err(|e| CliError::parse(&tmp, e))?;
    for row in rows {
        let row: Vec<String> = row.into_iter().collect();
        w.write_record(&row).map_err(|e| CliError::parse(&tmp, e))?;
    }
    w.flush().map_err(|e| CliError::io(&tmp, e))?;
    drop(w);
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path, header: &[&str]) -> CliResult<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::parse(path, e))?;
    let got = r.headers().map_err(|e| CliError::parse(path, e))?.clone();
    if got.len() < header.len() || got.iter().zip(header).any(|(a, b)| a != *b) {
        return Err(CliError::parse(
            path,
            format!("unexpected header {:?}, expected {:?}", got.iter().collect::<Vec<_>>(), header),
        ));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| CliError::parse(path, e)))
        .collect()
}

/// An entropy curve together with the master seed that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveFile {
    pub curve: EntropyCurve,
    pub master_seed: u64,
}

#[derive(Deserialize)]
struct CurveRow {
    #[serde(rename = "L")]
    l: usize,
    p: f64,
    mean_entropy_nats: f64,
    std_dev: f64,
    std_err: f64,
    n_traj: usize,
    master_seed: u64,
}

pub fn write_curve(path: &Path, curve: &EntropyCurve, master_seed: u64) -> CliResult<()> {
    curve.validate()?;
    let rows = (0..curve.p_values.len()).map(|i| {
        vec![
            curve.size.to_string(),
            fmt_f64(curve.p_values[i]),
            fmt_f64(curve.mean_entropy[i]),
            fmt_f64(curve.std_dev[i]),
            fmt_f64(curve.std_err[i]),
            curve.n_traj.to_string(),
            master_seed.to_string(),
        ]
    });
    write_rows(path, &CURVE_HEADER, rows)
}

pub fn read_curve(path: &Path) -> CliResult<CurveFile> {
    let rows: Vec<CurveRow> = read_rows(path, &CURVE_HEADER)?;
    let first = rows.first().ok_or_else(|| CliError::parse(path, "curve file has no rows"))?;
    let (l, n_traj, seed) = (first.l, first.n_traj, first.master_seed);
    if rows.iter().any(|r| r.l != l || r.n_traj != n_traj || r.master_seed != seed) {
        return Err(CliError::parse(path, "L, n_traj and master_seed must be constant"));
    }
    let curve = EntropyCurve {
        size: l,
        p_values: rows.iter().map(|r| r.p).collect(),
        mean_entropy: rows.iter().map(|r| r.mean_entropy_nats).collect(),
        std_dev: rows.iter().map(|r| r.std_dev).collect(),
        std_err: rows.iter().map(|r| r.std_err).collect(),
        n_traj,
    };
    curve.validate().map_err(|e| CliError::parse(path, e))?;
    Ok(CurveFile { curve, master_seed: seed })
}

/// All `curve_L*.csv` files in `dir`, ordered by size.
pub fn read_curve_dir(dir: &Path) -> CliResult<Vec<CurveFile>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("curve_L") && n.ends_with(".csv"))
        })
        .collect();
    paths.sort();
    let mut files = paths.iter().map(|p| read_curve(p)).collect::<CliResult<Vec<_>>>()?;
    files.sort_by_key(|f| f.curve.size);
    Ok(files)
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct PlaneFit {
    pub p_c: f64,
    pub p_c_err: f64,
    pub nu: f64,
    pub nu_err: f64,
}

/// One point of a plane scan.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct PlaneRow {
    pub idx: usize,
    pub e_p: f64,
    pub g_t: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub p: f64,
    pub mean_entropy_nats: f64,
    pub std_err: f64,
    #[serde(default)]
    pub p_c: Option<f64>,
    #[serde(default)]
    pub p_c_err: Option<f64>,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub nu_err: Option<f64>,
}

impl PlaneRow {
    pub fn fit(&self) -> Option<PlaneFit> {
        Some(PlaneFit {
            p_c: self.p_c?,
            p_c_err: self.p_c_err?,
            nu: self.nu?,
            nu_err: self.nu_err?,
        })
    }

    pub fn set_fit(&mut self, fit: Option<PlaneFit>) {
        self.p_c = fit.map(|f| f.p_c);
        self.p_c_err = fit.map(|f| f.p_c_err);
        self.nu = fit.map(|f| f.nu);
        self.nu_err = fit.map(|f| f.nu_err);
    }
}

/// Writes a plane table; the fit columns appear when `with_fit` is set and
/// are left blank for points whose collapse failed.
pub fn write_plane(path: &Path, rows: &[PlaneRow], with_fit: bool) -> CliResult<()> {
    let mut header: Vec<&str> = PLANE_HEADER.to_vec();
    if with_fit {
        header.extend(PLANE_FIT_HEADER);
    }
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    let out = rows.iter().map(|r| {
        let mut v = vec![
            r.idx.to_string(),
            fmt_f64(r.e_p),
            fmt_f64(r.g_t),
            fmt_f64(r.c1),
            fmt_f64(r.c2),
            fmt_f64(r.c3),
            fmt_f64(r.p),
            fmt_f64(r.mean_entropy_nats),
            fmt_f64(r.std_err),
        ];
        if with_fit {
            v.extend([opt(r.p_c), opt(r.p_c_err), opt(r.nu), opt(r.nu_err)]);
        }
        v
    });
    write_rows(path, &header, out)
}

pub fn read_plane(path: &Path) -> CliResult<Vec<PlaneRow>> {
    read_rows(path, &PLANE_HEADER)
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct CollapsedRow {
    #[serde(rename = "L")]
    pub l: usize,
    pub p: f64,
    pub x: f64,
    pub y: f64,
    pub std_err: f64,
}

pub fn write_collapsed(path: &Path, points: &[CollapsedPoint]) -> CliResult<()> {
    let rows = points.iter().map(|pt| {
        vec![pt.size.to_string(), fmt_f64(pt.p), fmt_f64(pt.x), fmt_f64(pt.y), fmt_f64(pt.std_err)]
    });
    write_rows(path, &COLLAPSED_HEADER, rows)
}

pub fn read_collapsed(path: &Path) -> CliResult<Vec<CollapsedRow>> {
    read_rows(path, &COLLAPSED_HEADER)
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct AnalyticRow {
    #[serde(rename = "N")]
    pub n: u32,
    pub t: u32,
    pub p: f64,
    pub entropy_nats: f64,
}

pub fn write_analytic(path: &Path, rows: &[AnalyticRow]) -> CliResult<()> {
    let out = rows.iter().map(|r| {
        vec![r.n.to_string(), r.t.to_string(), fmt_f64(r.p), fmt_f64(r.entropy_nats)]
    });
    write_rows(path, &ANALYTIC_HEADER, out)
}

pub fn read_analytic(path: &Path) -> CliResult<Vec<AnalyticRow>> {
    read_rows(path, &ANALYTIC_HEADER)
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(value).expect("report serialises");
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}
