//! Data collapse `S - S_c(L) = F((p - p_c) L^{1/nu})`.
//!
//! The objective is a master-curve residual: every rescaled point is compared
//! with the linear interpolation of each *other* size's rescaled curve at the
//! same abscissa, normalised by the combined variance. `S_c(L)` is read off
//! each curve at `p_c` with a natural cubic spline, so a `ln L` growth of the
//! critical entropy is absorbed.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::interp::{cubic_spline, cubic_spline_weights, linear_with_var, weighted_with_var};
use super::simplex::nelder_mead;
use crate::curve::EntropyCurve;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Fewer comparable point pairs than this cannot constrain a fit.
pub const MIN_COMPARABLE_POINTS: usize = 5;

/// Curves whose raw size-to-size chi-square per point stays below this are
/// treated as carrying no size dependence.
pub const INDISTINGUISHABLE_CHI2: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseFit {
    pub p_c: f64,
    pub nu: f64,
    pub p_c_err: f64,
    pub nu_err: f64,
    pub quality: f64,
    pub sizes_used: Vec<usize>,
    pub converged: bool,
    pub n_bootstrap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapseOptions {
    pub grid: usize,
    pub n_bootstrap: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for CollapseOptions {
    fn default() -> Self {
        CollapseOptions { grid: 50, n_bootstrap: 100, seed: 0, workers: 1 }
    }
}

/// One rescaled data point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollapsedPoint {
    pub size: usize,
    pub p: f64,
    pub x: f64,
    pub y: f64,
    pub std_err: f64,
}

struct Rescaled {
    xs: Vec<f64>,
    ys: Vec<f64>,
    errs: Vec<f64>,
    anchor_var: f64,
}

/// Validated set of curves ready for repeated quality evaluations.
pub struct CollapseData<'a> {
    curves: &'a [EntropyCurve],
    p_lo: f64,
    p_hi: f64,
}

fn check_sizes(curves: &[EntropyCurve]) -> Result<()> {
    let mut sizes: Vec<usize> = curves.iter().map(|c| c.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 3 || sizes.len() != curves.len() {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 curves of distinct sizes, got sizes {:?}",
            curves.iter().map(|c| c.size).collect::<Vec<_>>()
        )));
    }
    Ok(())
}

/// Mean chi-square between sizes on the raw, unscaled `(p, S)` curves.
fn raw_size_contrast(curves: &[EntropyCurve]) -> Option<f64> {
    let mut total = 0.0;
    let mut count = 0usize;
    for (a, ca) in curves.iter().enumerate() {
        for (b, cb) in curves.iter().enumerate() {
            if a == b {
                continue;
            }
            let (lo, hi) = cb.p_range();
            for i in 0..ca.p_values.len() {
                let p = ca.p_values[i];
                if p < lo || p > hi || cb.p_values.len() < 2 {
                    continue;
                }
                let (y, var) = linear_with_var(&cb.p_values, &cb.mean_entropy, &cb.std_err, p);
                let denom = ca.std_err[i].powi(2) + var;
                if denom > 0.0 {
                    total += (ca.mean_entropy[i] - y).powi(2) / denom;
                    count += 1;
                }
            }
        }
    }
    (count > 0).then(|| total / count as f64)
}

impl<'a> CollapseData<'a> {
    pub fn new(curves: &'a [EntropyCurve]) -> Result<Self> {
        check_sizes(curves)?;
        for c in curves {
            c.validate()?;
            if c.p_values.len() < 2 {
                return Err(Error::DegenerateFit(format!("curve L={} has one point", c.size)));
            }
        }
        if let Some(chi2) = raw_size_contrast(curves) {
            if chi2 <= INDISTINGUISHABLE_CHI2 {
                return Err(Error::DegenerateFit(format!(
                    "curves of different sizes are statistically indistinguishable \
                     (chi2 per point {chi2:.3})"
                )));
            }
        }
        let p_lo = curves.iter().map(|c| c.p_range().0).fold(f64::MIN, f64::max);
        let p_hi = curves.iter().map(|c| c.p_range().1).fold(f64::MAX, f64::min);
        Ok(CollapseData { curves, p_lo, p_hi })
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.curves.iter().map(|c| c.size).collect()
    }

    fn rescale(&self, p_c: f64, nu: f64, means: Option<&[Vec<f64>]>) -> Vec<Rescaled> {
        // curves usually share one p grid, so the anchor weights are reused
        let mut weights: Option<(&[f64], Vec<f64>)> = None;
        self.curves
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let ys_raw = means.map_or(&c.mean_entropy[..], |m| &m[k][..]);
                if weights.as_ref().is_none_or(|(grid, _)| *grid != &c.p_values[..]) {
                    weights = Some((&c.p_values, cubic_spline_weights(&c.p_values, p_c)));
                }
                let w = &weights.as_ref().unwrap().1;
                let (s_c, anchor_var) = weighted_with_var(w, ys_raw, &c.std_err);
                let scale = (c.size as f64).powf(1.0 / nu);
                Rescaled {
                    xs: c.p_values.iter().map(|p| (p - p_c) * scale).collect(),
                    ys: ys_raw.iter().map(|s| s - s_c).collect(),
                    errs: c.std_err.clone(),
                    anchor_var,
                }
            })
            .collect()
    }

    /// Objective at `(p_c, nu)`; `means` optionally replaces the curves'
    /// mean entropies (used by the bootstrap).
    pub fn quality_with(&self, p_c: f64, nu: f64, means: Option<&[Vec<f64>]>) -> Result<f64> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::Domain(format!("nu = {nu} must be positive")));
        }
        if !(p_c >= self.p_lo && p_c <= self.p_hi) {
            return Err(Error::Domain(format!(
                "p_c = {p_c} outside the common p range [{}, {}]",
                self.p_lo, self.p_hi
            )));
        }
        let rescaled = self.rescale(p_c, nu, means);
        let mut total = 0.0;
        let mut count = 0usize;
        for (a, ra) in rescaled.iter().enumerate() {
            for (b, rb) in rescaled.iter().enumerate() {
                if a == b {
                    continue;
                }
                let (lo, hi) = (rb.xs[0], *rb.xs.last().unwrap());
                for i in 0..ra.xs.len() {
                    let x = ra.xs[i];
                    if x < lo || x > hi {
                        continue;
                    }
                    let (y, var_b) = linear_with_var(&rb.xs, &rb.ys, &rb.errs, x);
                    let denom = ra.errs[i].powi(2) + ra.anchor_var + var_b + rb.anchor_var;
                    if denom > 0.0 {
                        total += (ra.ys[i] - y).powi(2) / denom;
                        count += 1;
                    }
                }
            }
        }
        if count < MIN_COMPARABLE_POINTS {
            return Err(Error::DegenerateFit(format!(
                "only {count} comparable points at p_c = {p_c}, nu = {nu}"
            )));
        }
        Ok(total / count as f64)
    }

    pub fn quality(&self, p_c: f64, nu: f64) -> Result<f64> {
        self.quality_with(p_c, nu, None)
    }
}

/// Error-weighted master-curve residual of the collapse at `(p_c, nu)`.
pub fn collapse_quality(curves: &[EntropyCurve], p_c: f64, nu: f64) -> Result<f64> {
    CollapseData::new(curves)?.quality(p_c, nu)
}

/// Rescaled points `(x, y)` of every curve at the given parameters.
pub fn collapsed_points(curves: &[EntropyCurve], p_c: f64, nu: f64) -> Vec<CollapsedPoint> {
    let mut out = Vec::new();
    for c in curves {
        let s_c = cubic_spline(&c.p_values, &c.mean_entropy, p_c);
        let scale = (c.size as f64).powf(1.0 / nu);
        for i in 0..c.p_values.len() {
            out.push(CollapsedPoint {
                size: c.size,
                p: c.p_values[i],
                x: (c.p_values[i] - p_c) * scale,
                y: c.mean_entropy[i] - s_c,
                std_err: c.std_err[i],
            });
        }
    }
    out
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

struct Minimum {
    p_c: f64,
    nu: f64,
    value: f64,
    improved: bool,
}

fn bounded<'b>(
    data: &'b CollapseData<'_>,
    p_c_range: (f64, f64),
    nu_range: (f64, f64),
    means: Option<&'b [Vec<f64>]>,
) -> impl Fn([f64; 2]) -> f64 + 'b {
    move |x: [f64; 2]| {
        let inside = x[0] >= p_c_range.0
            && x[0] <= p_c_range.1
            && x[1] >= nu_range.0
            && x[1] <= nu_range.1;
        if !inside {
            return f64::INFINITY;
        }
        data.quality_with(x[0], x[1], means).unwrap_or(f64::INFINITY)
    }
}

fn refine(
    data: &CollapseData<'_>,
    p_c_range: (f64, f64),
    nu_range: (f64, f64),
    start: [f64; 2],
    step: [f64; 2],
    means: Option<&[Vec<f64>]>,
) -> Minimum {
    let f = bounded(data, p_c_range, nu_range, means);
    let f0 = f(start);
    let r = nelder_mead(&f, start, step, 1e-10, 400);
    if r.value < f0 {
        Minimum { p_c: r.x[0], nu: r.x[1], value: r.value, improved: true }
    } else {
        Minimum { p_c: start[0], nu: start[1], value: f0, improved: false }
    }
}

fn grid_then_refine(
    data: &CollapseData<'_>,
    p_c_range: (f64, f64),
    nu_range: (f64, f64),
    grid: usize,
    means: Option<&[Vec<f64>]>,
) -> Result<Minimum> {
    let pcs = linspace(p_c_range.0, p_c_range.1, grid);
    let nus = linspace(nu_range.0, nu_range.1, grid);
    let f = bounded(data, p_c_range, nu_range, means);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &pc in &pcs {
        for &nu in &nus {
            let v = f([pc, nu]);
            if v < best.0 {
                best = (v, pc, nu);
            }
        }
    }
    if !best.0.is_finite() {
        return Err(Error::DegenerateFit(
            "collapse objective is undefined over the whole parameter grid".into(),
        ));
    }
    let step = [
        (p_c_range.1 - p_c_range.0) / grid.max(2) as f64,
        (nu_range.1 - nu_range.0) / grid.max(2) as f64,
    ];
    Ok(refine(data, p_c_range, nu_range, [best.1, best.2], step, means))
}

/// Best-fit `(p_c, nu)` by grid scan plus simplex refinement, with parametric
/// bootstrap errors.
pub fn fit_collapse(
    curves: &[EntropyCurve],
    p_c_range: (f64, f64),
    nu_range: (f64, f64),
    opts: &CollapseOptions,
) -> Result<CollapseFit> {
    if !(p_c_range.0 < p_c_range.1) || !(nu_range.0 < nu_range.1) || nu_range.0 <= 0.0 {
        return Err(Error::Domain(format!(
            "empty or invalid fit ranges p_c {p_c_range:?}, nu {nu_range:?}"
        )));
    }
    let data = CollapseData::new(curves)?;
    let central = grid_then_refine(&data, p_c_range, nu_range, opts.grid, None)?;

    // every resample gets the full global search: the objective is
    // multimodal at realistic noise, and a local refit from the central
    // optimum would report the width of one basin instead of the scatter
    let resample = |b: usize| -> Option<[f64; 2]> {
        let mut rng = rng_from_seed(derive_seed(opts.seed, &[b as u64]));
        let means: Vec<Vec<f64>> = curves
            .iter()
            .map(|c| {
                c.mean_entropy
                    .iter()
                    .zip(&c.std_err)
                    .map(|(m, e)| m + e * rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        let m = grid_then_refine(&data, p_c_range, nu_range, opts.grid, Some(&means)).ok()?;
        Some([m.p_c, m.nu])
    };
    let boots: Vec<[f64; 2]> = if opts.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
        pool.install(|| (0..opts.n_bootstrap).into_par_iter().filter_map(resample).collect())
    } else {
        (0..opts.n_bootstrap).filter_map(resample).collect()
    };
    let spread = |k: usize| -> f64 {
        let v: Vec<f64> = boots.iter().map(|b| b[k]).collect();
        crate::curve::mean_std(&v).1
    };
    let (p_c_err, nu_err) = if boots.len() >= 2 { (spread(0), spread(1)) } else { (0.0, 0.0) };

    Ok(CollapseFit {
        p_c: central.p_c,
        nu: central.nu,
        p_c_err,
        nu_err,
        quality: central.value,
        sizes_used: data.sizes(),
        converged: central.improved,
        n_bootstrap: opts.n_bootstrap,
    })
}
