//! Experiment description read from (and re-written as) a JSON document.
//!
//! Every default is materialised on load so the copy persisted next to the
//! results spells out the exact protocol that produced them.

use std::fs;
use std::path::{Path, PathBuf};

use mipt_core::circuit::SweepParams;
use mipt_core::gates::cartan_from_invariants;
use mipt_core::CartanCoeffs;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const DEFAULT_N_TRAJ: usize = 1500;
pub const DEFAULT_T_FACTOR: usize = 2;

/// Default measurement grid: 21 evenly spaced points on `[0, 0.6]`.
pub fn default_p_grid() -> Vec<f64> {
    (0..=20).map(|i| (3 * i) as f64 / 100.0).collect()
}

/// The interaction core, given directly or through its invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateSpec {
    Cartan { c1: f64, c2: f64, c3: f64 },
    Invariants { e_p: f64, g_t: f64 },
}

impl GateSpec {
    pub fn cartan(&self) -> CliResult<CartanCoeffs> {
        Ok(match *self {
            GateSpec::Cartan { c1, c2, c3 } => CartanCoeffs::new(c1, c2, c3)?,
            GateSpec::Invariants { e_p, g_t } => cartan_from_invariants(e_p, g_t)?,
        })
    }
}

impl From<CartanCoeffs> for GateSpec {
    fn from(c: CartanCoeffs) -> Self {
        GateSpec::Cartan { c1: c.c1, c2: c.c2, c3: c.c3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeSteps {
    /// `t = factor * L`.
    PerSize(usize),
    Fixed(usize),
}

impl TimeSteps {
    pub fn for_size(&self, l: usize) -> usize {
        match *self {
            TimeSteps::PerSize(k) => k * l,
            TimeSteps::Fixed(t) => t,
        }
    }
}

impl Default for TimeSteps {
    fn default() -> Self {
        TimeSteps::PerSize(DEFAULT_T_FACTOR)
    }
}

fn default_n_traj() -> usize {
    DEFAULT_N_TRAJ
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub gate: GateSpec,
    pub sizes: Vec<usize>,
    #[serde(default = "default_p_grid")]
    pub p_grid: Vec<f64>,
    #[serde(default = "default_n_traj")]
    pub n_traj: usize,
    #[serde(default)]
    pub t_steps: TimeSteps,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn new(name: &str, gate: GateSpec, sizes: Vec<usize>) -> Self {
        ExperimentSpec {
            name: name.to_string(),
            gate,
            sizes,
            p_grid: default_p_grid(),
            n_traj: DEFAULT_N_TRAJ,
            t_steps: TimeSteps::default(),
            master_seed: 0,
            output_dir: default_output_dir(),
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let spec: ExperimentSpec =
            serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self).expect("spec serialises");
        fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
    }

    pub fn validate(&self) -> CliResult<()> {
        self.gate.cartan()?;
        if self.sizes.is_empty() {
            return Err(CliError::Usage("spec lists no system sizes".into()));
        }
        if self.p_grid.is_empty() {
            return Err(CliError::Usage("spec has an empty p grid".into()));
        }
        for l in &self.sizes {
            self.sweep_params(*l)?.trajectory_config(0, 0).validate()?;
        }
        for p in &self.p_grid {
            if !(0.0..=1.0).contains(p) {
                return Err(mipt_core::Error::Domain(format!("p = {p} outside [0, 1]")).into());
            }
        }
        if self.p_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Usage("p grid must be strictly ascending".into()));
        }
        if self.n_traj == 0 {
            return Err(CliError::Usage("n_traj must be at least 1".into()));
        }
        Ok(())
    }

    pub fn sweep_params(&self, l: usize) -> CliResult<SweepParams> {
        Ok(SweepParams {
            n_qubits: l,
            cartan: self.gate.cartan()?,
            p_grid: self.p_grid.clone(),
            n_traj: self.n_traj,
            t_steps: self.t_steps.for_size(l),
            master_seed: self.master_seed,
        })
    }
}
