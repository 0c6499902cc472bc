//! Size scaling of the entropy at fixed measurement rate.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::interp::linear_with_var;
use crate::curve::EntropyCurve;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Volume,
    Critical,
    Area,
}

/// Weighted least-squares fit `S(L) = a L + b ln L + c` at one `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeFit {
    pub regime: Regime,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub a_err: f64,
    pub b_err: f64,
    pub reduced_chi2: f64,
}

const MIN_SIGMA: f64 = 1e-9;

pub fn fit_size_scaling(curves: &[EntropyCurve], p: f64) -> Result<RegimeFit> {
    if curves.len() < 4 {
        return Err(Error::DegenerateFit(format!(
            "regime classification needs at least 4 sizes, got {}",
            curves.len()
        )));
    }
    let mut rows = Vec::with_capacity(curves.len());
    for c in curves {
        c.validate()?;
        let (lo, hi) = c.p_range();
        if !(p >= lo && p <= hi) || c.p_values.len() < 2 {
            return Err(Error::Domain(format!(
                "p = {p} outside the range of curve L={}",
                c.size
            )));
        }
        let (s, var) = linear_with_var(&c.p_values, &c.mean_entropy, &c.std_err, p);
        let l = c.size as f64;
        rows.push(([l, l.ln(), 1.0], s, var.sqrt().max(MIN_SIGMA)));
    }
    let mut normal = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for (x, y, sigma) in &rows {
        let w = 1.0 / (sigma * sigma);
        let xv = Vector3::from(*x);
        normal += w * xv * xv.transpose();
        rhs += w * y * xv;
    }
    let cov = normal
        .try_inverse()
        .ok_or_else(|| Error::Numerical("singular size-scaling normal equations".into()))?;
    let coef = cov * rhs;
    let chi2: f64 = rows
        .iter()
        .map(|(x, y, sigma)| ((Vector3::from(*x).dot(&coef) - y) / sigma).powi(2))
        .sum();
    let dof = (rows.len() - 3).max(1) as f64;
    let reduced_chi2 = chi2 / dof;
    // inflate parameter errors when the model under-fits the scatter
    let inflate = reduced_chi2.max(1.0);
    let a_err = (cov[(0, 0)] * inflate).sqrt();
    let b_err = (cov[(1, 1)] * inflate).sqrt();
    let (a, b, c) = (coef[0], coef[1], coef[2]);
    let regime = if a > 3.0 * a_err {
        Regime::Volume
    } else if a.abs() <= 2.0 * a_err && b.abs() <= 2.0 * b_err {
        Regime::Area
    } else {
        Regime::Critical
    };
    Ok(RegimeFit { regime, a, b, c, a_err, b_err, reduced_chi2 })
}

pub fn classify_regime(curves: &[EntropyCurve], p: f64) -> Result<Regime> {
    fit_size_scaling(curves, p).map(|f| f.regime)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curves_from(f: impl Fn(f64) -> f64, err: f64) -> Vec<EntropyCurve> {
        [6usize, 8, 10, 12, 14, 16]
            .iter()
            .map(|&l| EntropyCurve {
                size: l,
                p_values: vec![0.0, 0.5, 1.0],
                mean_entropy: vec![f(l as f64); 3],
                std_dev: vec![err; 3],
                std_err: vec![err; 3],
                n_traj: 1,
            })
            .collect()
    }

    #[test]
    fn classifies_synthetic_laws() {
        let vol = curves_from(|l| 0.3 * l + 0.1, 0.01);
        assert_eq!(classify_regime(&vol, 0.5).unwrap(), Regime::Volume);
        let area = curves_from(|_| 0.7, 0.01);
        assert_eq!(classify_regime(&area, 0.5).unwrap(), Regime::Area);
        let crit = curves_from(|l| 0.8 * l.ln() - 0.2, 0.01);
        assert_eq!(classify_regime(&crit, 0.5).unwrap(), Regime::Critical);
        let fit = fit_size_scaling(&crit, 0.25).unwrap();
        assert!((fit.b - 0.8).abs() < 1e-8 && fit.a.abs() < 1e-8);
    }

    #[test]
    fn needs_four_sizes() {
        let mut c = curves_from(|_| 1.0, 0.01);
        c.truncate(3);
        assert!(classify_regime(&c, 0.5).is_err());
        let c = curves_from(|_| 1.0, 0.01);
        assert!(matches!(classify_regime(&c, 1.5), Err(Error::Domain(_))));
    }
}
