use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mipt_core::analytics::{measurement_only_entropy, MeasurementOnlyParams};
use mipt_core::circuit::{sweep, SweepParams};
use mipt_core::gates::{
    cartan_from_invariants, cartan_gate, invariants_from_gate, is_feasible, operator_schmidt,
    MAX_ENTANGLING_POWER,
};
use mipt_core::rng::{derive_seed, rng_from_seed};
use mipt_core::scaling::{
    collapsed_points, crossing_estimate, fit_collapse, CollapseFit, CollapseOptions,
    CrossingEstimate, DEFAULT_NU_RANGE, DEFAULT_P_C_RANGE,
};
use mipt_core::{CartanCoeffs, EntropyCurve, Error};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::{self, CurveFile, PlaneFit, PlaneRow};
use crate::spec::{ExperimentSpec, GateSpec};

pub const WORKERS_ENV: &str = "MIPT_WORKERS";

/// Worker count: explicit flag, else `MIPT_WORKERS`, else 1.
pub fn resolve_workers(flag: Option<usize>) -> CliResult<usize> {
    if let Some(w) = flag {
        return Ok(w.max(1));
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|w| w.max(1))
            .map_err(|_| CliError::Usage(format!("{WORKERS_ENV}={v:?} is not a worker count"))),
        Err(_) => Ok(1),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub cartan: CartanCoeffs,
    pub e_p: f64,
    pub g_t: f64,
    pub e_u: f64,
    pub e_us: f64,
    pub schmidt: [f64; 4],
    pub dual_unitary: bool,
    pub t_dual: bool,
}

const FLAG_TOL: f64 = 1e-10;

pub fn gate_info(gate: &GateSpec) -> CliResult<GateReport> {
    let cartan = gate.cartan()?;
    let u = cartan_gate(&cartan)?;
    let inv = invariants_from_gate(&u);
    Ok(GateReport {
        cartan,
        e_p: inv.e_p,
        g_t: inv.g_t,
        e_u: inv.e_u,
        e_us: inv.e_us,
        schmidt: operator_schmidt(u.matrix()).lambdas,
        dual_unitary: inv.is_dual_unitary(FLAG_TOL),
        t_dual: inv.is_t_dual(FLAG_TOL),
    })
}

/// Overrides applied on top of a loaded spec.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

impl RunOverrides {
    pub fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(dir) = &self.output_dir {
            spec.output_dir = dir.clone();
        }
        if let Some(seed) = self.seed {
            spec.master_seed = seed;
        }
    }
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn matches_params(file: &CurveFile, params: &SweepParams) -> bool {
    file.master_seed == params.master_seed
        && file.curve.n_traj == params.n_traj
        && file.curve.size == params.n_qubits
        && file.curve.p_values == params.p_grid
}

/// Runs every size of `spec` and writes one curve CSV per size plus the
/// resolved spec. With `resume`, sizes whose file already matches are kept.
pub fn run_sweep(
    spec: &ExperimentSpec,
    workers: usize,
    resume: bool,
) -> CliResult<Vec<PathBuf>> {
    spec.validate()?;
    let dir = &spec.output_dir;
    ensure_dir(dir)?;
    spec.save(&dir.join("spec.json"))?;
    let mut written = Vec::new();
    for &l in &spec.sizes {
        let params = spec.sweep_params(l)?;
        let path = dir.join(io::curve_file_name(l));
        if resume && path.exists() {
            if let Ok(existing) = io::read_curve(&path) {
                if matches_params(&existing, &params) {
                    eprintln!("sweep {}: L={l} already present, skipping", spec.name);
                    written.push(path);
                    continue;
                }
            }
        }
        let start = Instant::now();
        let curve = sweep(&params, workers)?;
        io::write_curve(&path, &curve, params.master_seed)?;
        eprintln!(
            "sweep {}: L={l} t={} n_traj={} done in {:.1}s",
            spec.name,
            params.t_steps,
            params.n_traj,
            start.elapsed().as_secs_f64()
        );
        written.push(path);
    }
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseSettings {
    pub p_c_range: (f64, f64),
    pub nu_range: (f64, f64),
    pub grid: usize,
    pub n_bootstrap: usize,
    pub seed: u64,
}

impl Default for CollapseSettings {
    fn default() -> Self {
        let opts = CollapseOptions::default();
        CollapseSettings {
            p_c_range: DEFAULT_P_C_RANGE,
            nu_range: DEFAULT_NU_RANGE,
            grid: opts.grid,
            n_bootstrap: opts.n_bootstrap,
            seed: opts.seed,
        }
    }
}

impl CollapseSettings {
    pub fn fit(&self, curves: &[EntropyCurve], workers: usize) -> CliResult<CollapseFit> {
        let opts = CollapseOptions {
            grid: self.grid,
            n_bootstrap: self.n_bootstrap,
            seed: self.seed,
            workers,
        };
        Ok(fit_collapse(curves, self.p_c_range, self.nu_range, &opts)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseReport {
    pub inputs: Vec<PathBuf>,
    pub settings: CollapseSettings,
    pub fit: CollapseFit,
    pub crossing: Option<CrossingEstimate>,
    pub crossing_error: Option<String>,
}

pub const COLLAPSE_REPORT: &str = "collapse_fit.json";
pub const COLLAPSED_POINTS: &str = "collapsed_points.csv";

/// Fits the collapse and crossing of the given curve files and writes the
/// JSON report and the rescaled points into `out_dir`.
pub fn run_collapse(
    inputs: &[PathBuf],
    settings: &CollapseSettings,
    out_dir: &Path,
    workers: usize,
) -> CliResult<CollapseReport> {
    let curves: Vec<EntropyCurve> = inputs
        .iter()
        .map(|p| io::read_curve(p).map(|f| f.curve))
        .collect::<CliResult<_>>()?;
    if curves.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "collapse needs at least 3 curve files, got {}",
            curves.len()
        ))
        .into());
    }
    let fit = settings.fit(&curves, workers)?;
    let (crossing, crossing_error) = match crossing_estimate(&curves) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let report = CollapseReport {
        inputs: inputs.to_vec(),
        settings: *settings,
        fit: fit.clone(),
        crossing,
        crossing_error,
    };
    ensure_dir(out_dir)?;
    io::write_json(&out_dir.join(COLLAPSE_REPORT), &report)?;
    io::write_collapsed(
        &out_dir.join(COLLAPSED_POINTS),
        &collapsed_points(&curves, fit.p_c, fit.nu),
    )?;
    Ok(report)
}

pub fn read_collapse_report(path: &Path) -> CliResult<CollapseReport> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneScanArgs {
    pub n_points: usize,
    /// Measurement rate of the reported entropy column.
    pub p: f64,
    /// Size of the reported entropy column; defaults to the largest size.
    pub size: Option<usize>,
    /// Explicit `(e_p, g_t)` points instead of random sampling.
    pub points: Vec<(f64, f64)>,
    /// Also fit `(p_c, nu)` per point over every size of the template.
    pub fit: Option<CollapseSettings>,
}

const PLANE_SAMPLER_STREAM: u64 = u64::MAX;

/// `n` points drawn uniformly from the permissible `(e_p, g_t)` region by
/// rejection from its bounding box.
pub fn sample_plane(n: usize, master_seed: u64) -> Vec<(f64, f64)> {
    let mut rng = rng_from_seed(derive_seed(master_seed, &[PLANE_SAMPLER_STREAM]));
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let e = rng.gen::<f64>() * MAX_ENTANGLING_POWER;
        let g = rng.gen::<f64>();
        if is_feasible(e, g) {
            out.push((e, g));
        }
    }
    out
}

pub fn point_file(dir: &Path, idx: usize, master_seed: u64) -> PathBuf {
    dir.join("points").join(format!("point_{idx:05}_seed_{master_seed}.csv"))
}

pub const PLANE_TABLE: &str = "plane.csv";

fn plane_point(
    template: &ExperimentSpec,
    args: &PlaneScanArgs,
    idx: usize,
    (e_p, g_t): (f64, f64),
    workers: usize,
) -> CliResult<PlaneRow> {
    let cartan = cartan_from_invariants(e_p, g_t)?;
    let mut spec = template.clone();
    spec.gate = cartan.into();
    spec.master_seed = derive_seed(template.master_seed, &[idx as u64]);
    let size = args.size.unwrap_or_else(|| *spec.sizes.iter().max().unwrap());

    let mut entropy_curve = None;
    let mut fit = None;
    if let Some(settings) = &args.fit {
        let curves: Vec<EntropyCurve> = spec
            .sizes
            .iter()
            .map(|&l| Ok(sweep(&spec.sweep_params(l)?, workers)?))
            .collect::<CliResult<_>>()?;
        match settings.fit(&curves, workers) {
            Ok(f) => {
                fit = Some(PlaneFit { p_c: f.p_c, p_c_err: f.p_c_err, nu: f.nu, nu_err: f.nu_err })
            }
            Err(e) => eprintln!("plane-scan point {idx}: no collapse fit ({e})"),
        }
        entropy_curve = curves.into_iter().find(|c| c.size == size);
    }
    let (mean, err) = match entropy_curve.as_ref().and_then(|c| c.index_of(args.p).map(|i| (c, i))) {
        Some((c, i)) => (c.mean_entropy[i], c.std_err[i]),
        None => {
            let mut params = spec.sweep_params(size)?;
            params.p_grid = vec![args.p];
            let c = sweep(&params, workers)?;
            (c.mean_entropy[0], c.std_err[0])
        }
    };
    let mut row = PlaneRow {
        idx,
        e_p,
        g_t,
        c1: cartan.c1,
        c2: cartan.c2,
        c3: cartan.c3,
        p: args.p,
        mean_entropy_nats: mean,
        std_err: err,
        p_c: None,
        p_c_err: None,
        nu: None,
        nu_err: None,
    };
    row.set_fit(fit);
    Ok(row)
}

/// Sweeps every sampled gate and writes the combined table. Each point is
/// also stored on its own, so an interrupted scan resumes where it stopped.
pub fn run_plane_scan(
    template: &ExperimentSpec,
    args: &PlaneScanArgs,
    workers: usize,
) -> CliResult<Vec<PlaneRow>> {
    if args.n_points == 0 && args.points.is_empty() {
        return Err(CliError::Usage("plane scan needs at least one point".into()));
    }
    if !(0.0..=1.0).contains(&args.p) {
        return Err(Error::Domain(format!("p = {} outside [0, 1]", args.p)).into());
    }
    template.validate()?;
    let dir = &template.output_dir;
    ensure_dir(&dir.join("points"))?;
    template.save(&dir.join("spec.json"))?;

    let points = if args.points.is_empty() {
        sample_plane(args.n_points, template.master_seed)
    } else {
        args.points.clone()
    };
    let with_fit = args.fit.is_some();
    let mut rows = Vec::with_capacity(points.len());
    for (idx, &pt) in points.iter().enumerate() {
        let path = point_file(dir, idx, template.master_seed);
        if path.exists() {
            if let Some(row) = io::read_plane(&path)?.into_iter().next() {
                rows.push(row);
                continue;
            }
        }
        let row = plane_point(template, args, idx, pt, workers)?;
        io::write_plane(&path, &[row], with_fit)?;
        rows.push(row);
    }
    io::write_plane(&dir.join(PLANE_TABLE), &rows, with_fit)?;
    Ok(rows)
}

pub fn analytic_file_name(n: u32, t: u32) -> String {
    format!("analytic_N{n:02}_t{t:02}.csv")
}

/// Closed-form measurement-only curve for `N = n_half` qubits per half.
pub fn run_analytic(
    n_half: u32,
    t: u32,
    p_grid: &[f64],
    out_dir: &Path,
) -> CliResult<(PathBuf, Vec<io::AnalyticRow>)> {
    let rows = p_grid
        .iter()
        .map(|&p| {
            let s = measurement_only_entropy(&MeasurementOnlyParams { n_half, p, t })?;
            Ok(io::AnalyticRow { n: n_half, t, p, entropy_nats: s })
        })
        .collect::<CliResult<Vec<_>>>()?;
    ensure_dir(out_dir)?;
    let path = out_dir.join(analytic_file_name(n_half, t));
    io::write_analytic(&path, &rows)?;
    Ok((path, rows))
}
