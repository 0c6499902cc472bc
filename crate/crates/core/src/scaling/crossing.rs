//! Crossing of the shifted curves `S - ln L`.

use serde::{Deserialize, Serialize};

use super::interp::linear;
use crate::curve::EntropyCurve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingEstimate {
    pub p_c: f64,
    pub band: (f64, f64),
    pub crossings: Vec<f64>,
}

fn shifted(c: &EntropyCurve) -> Vec<f64> {
    let shift = (c.size as f64).ln();
    c.mean_entropy.iter().map(|s| s - shift).collect()
}

/// Abscissae where two piecewise-linear curves intersect.
fn pairwise_crossings(a: &EntropyCurve, b: &EntropyCurve) -> Vec<f64> {
    let (ya, yb) = (shifted(a), shifted(b));
    let lo = a.p_range().0.max(b.p_range().0);
    let hi = a.p_range().1.min(b.p_range().1);
    if !(lo < hi) {
        return Vec::new();
    }
    let mut grid: Vec<f64> = a
        .p_values
        .iter()
        .chain(&b.p_values)
        .copied()
        .filter(|p| *p >= lo && *p <= hi)
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    let diff: Vec<f64> = grid
        .iter()
        .map(|&p| linear(&a.p_values, &ya, p).0 - linear(&b.p_values, &yb, p).0)
        .collect();
    let mut out = Vec::new();
    for k in 0..grid.len() {
        if diff[k] == 0.0 {
            out.push(grid[k]);
            continue;
        }
        if k + 1 < grid.len() && diff[k] * diff[k + 1] < 0.0 {
            // the difference is linear between merged nodes
            let t = diff[k] / (diff[k] - diff[k + 1]);
            out.push(grid[k] + t * (grid[k + 1] - grid[k]));
        }
    }
    out
}

/// Median and min-max band of all pairwise crossings of `S - ln L`.
pub fn crossing_estimate(curves: &[EntropyCurve]) -> Result<CrossingEstimate> {
    if curves.len() < 2 {
        return Err(Error::DegenerateFit(
            "crossing estimate needs at least two sizes".into(),
        ));
    }
    for c in curves {
        c.validate()?;
        if c.p_values.len() < 2 {
            return Err(Error::DegenerateFit(format!("curve L={} has one point", c.size)));
        }
    }
    let mut crossings = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            crossings.extend(pairwise_crossings(&curves[i], &curves[j]));
        }
    }
    if crossings.is_empty() {
        return Err(Error::NoCrossing(
            "no pair of shifted curves intersects in the common p range".into(),
        ));
    }
    crossings.sort_by(f64::total_cmp);
    let n = crossings.len();
    let median = if n % 2 == 1 {
        crossings[n / 2]
    } else {
        0.5 * (crossings[n / 2 - 1] + crossings[n / 2])
    };
    Ok(CrossingEstimate {
        p_c: median,
        band: (crossings[0], crossings[n - 1]),
        crossings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(size: usize, ps: &[f64], f: impl Fn(f64) -> f64) -> EntropyCurve {
        let n = ps.len();
        EntropyCurve {
            size,
            p_values: ps.to_vec(),
            mean_entropy: ps.iter().map(|&p| f(p)).collect(),
            std_dev: vec![0.01; n],
            std_err: vec![0.01; n],
            n_traj: 1,
        }
    }

    #[test]
    fn parallel_curves_never_cross() {
        let ps: Vec<f64> = (0..10).map(|i| i as f64 * 0.05).collect();
        let a = curve(8, &ps, |p| 3.0 - p + 8f64.ln());
        let b = curve(12, &ps, |p| 2.0 - p + 12f64.ln());
        assert!(matches!(crossing_estimate(&[a, b]), Err(Error::NoCrossing(_))));
    }

    #[test]
    fn single_curve_rejected() {
        let ps = [0.1, 0.2];
        assert!(crossing_estimate(&[curve(8, &ps, |p| p)]).is_err());
    }

    #[test]
    fn linear_crossing_located_exactly() {
        let ps: Vec<f64> = (0..=12).map(|i| i as f64 * 0.05).collect();
        let sizes = [6usize, 10, 14];
        let curves: Vec<_> = sizes
            .iter()
            .map(|&l| {
                let lf = l as f64;
                curve(l, &ps, move |p| lf.ln() + 0.2 * lf * (0.37 - p))
            })
            .collect();
        let est = crossing_estimate(&curves).unwrap();
        assert_eq!(est.crossings.len(), 3);
        assert!((est.p_c - 0.37).abs() < 1e-12);
        assert!((est.band.1 - est.band.0).abs() < 1e-12);
    }
}
