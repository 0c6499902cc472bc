use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trajectory-averaged half-chain entropy versus measurement probability
/// for one system size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyCurve {
    pub size: usize,
    pub p_values: Vec<f64>,
    pub mean_entropy: Vec<f64>,
    pub std_dev: Vec<f64>,
    pub std_err: Vec<f64>,
    pub n_traj: usize,
}

impl EntropyCurve {
    pub fn validate(&self) -> Result<()> {
        let n = self.p_values.len();
        if n == 0 {
            return Err(Error::Domain(format!("curve L={} is empty", self.size)));
        }
        if self.mean_entropy.len() != n || self.std_err.len() != n || self.std_dev.len() != n {
            return Err(Error::Domain(format!(
                "curve L={} has mismatched column lengths",
                self.size
            )));
        }
        if self.p_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain(format!(
                "curve L={} p values are not strictly ascending",
                self.size
            )));
        }
        if self.std_err.iter().any(|&e| !(e >= 0.0)) {
            return Err(Error::Domain(format!(
                "curve L={} has negative or NaN standard errors",
                self.size
            )));
        }
        Ok(())
    }

    pub fn p_range(&self) -> (f64, f64) {
        (self.p_values[0], *self.p_values.last().unwrap())
    }

    /// Index of `p` in the grid, if it is one of the sampled points.
    pub fn index_of(&self, p: f64) -> Option<usize> {
        self.p_values.iter().position(|&q| (q - p).abs() < 1e-12)
    }

    /// Builds a curve from raw per-trajectory samples at each `p`.
    pub fn from_samples(size: usize, p_values: Vec<f64>, samples: &[Vec<f64>]) -> Self {
        let mut mean_entropy = Vec::with_capacity(samples.len());
        let mut std_dev = Vec::with_capacity(samples.len());
        let mut std_err = Vec::with_capacity(samples.len());
        for s in samples {
            let (m, sd, se) = mean_std(s);
            mean_entropy.push(m);
            std_dev.push(sd);
            std_err.push(se);
        }
        let n_traj = samples.first().map_or(0, Vec::len);
        EntropyCurve { size, p_values, mean_entropy, std_dev, std_err, n_traj }
    }
}

/// Mean, sample standard deviation and standard error of the mean.
pub fn mean_std(xs: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    (mean, sd, sd / n.sqrt())
}
