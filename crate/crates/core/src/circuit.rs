//! Hybrid-circuit trajectories: brick-wall unitary layers built from one
//! fixed interaction core with fresh Haar locals, each followed by a layer of
//! random single-qubit Z measurements.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::EntropyCurve;
use crate::error::{Error, Result};
use crate::gates::{cartan_gate, dress_gate_unchecked, haar_su2, CartanCoeffs};
use crate::qstate::{StateVector, TwoQubitGate, DEFAULT_MAX_QUBITS};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitConfig {
    pub n_qubits: usize,
    pub cartan: CartanCoeffs,
    pub p: f64,
    pub t_steps: usize,
    pub seed: u64,
    pub record_timeseries: bool,
    pub max_qubits: usize,
}

impl CircuitConfig {
    /// Config with the default depth `t = 2L` and no time series.
    pub fn new(n_qubits: usize, cartan: CartanCoeffs, p: f64, seed: u64) -> Self {
        CircuitConfig {
            n_qubits,
            cartan,
            p,
            t_steps: 2 * n_qubits,
            seed,
            record_timeseries: false,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        if n % 2 != 0 || n < 4 {
            return Err(Error::Size(format!("L must be even and >= 4, got {n}")));
        }
        if n > self.max_qubits {
            return Err(Error::Size(format!(
                "L = {n} exceeds the memory cap of {}",
                self.max_qubits
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Domain(format!("p = {} outside [0, 1]", self.p)));
        }
        if self.t_steps == 0 {
            return Err(Error::Domain("t_steps must be at least 1".into()));
        }
        self.cartan.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub final_entropy: f64,
    pub entropy_series: Option<Vec<f64>>,
    pub n_measurements: usize,
    pub seed: u64,
}

fn dressed<R: Rng + ?Sized>(core: &TwoQubitGate, rng: &mut R) -> TwoQubitGate {
    let u_k = haar_su2(rng);
    let u_k1 = haar_su2(rng);
    let w_k = haar_su2(rng);
    let w_k1 = haar_su2(rng);
    dress_gate_unchecked(core, &u_k, &u_k1, &w_k, &w_k1)
}

/// One unitary step `V`: pairs `(0,1), (2,3), ...` first, then
/// `(1,2), (3,4), ...` on the open chain. Every pair gets its own locals.
pub fn brickwall_layer_with_core<R: Rng + ?Sized>(
    state: &mut StateVector,
    core: &TwoQubitGate,
    rng: &mut R,
) -> Result<()> {
    let n = state.n_qubits();
    for start in [0usize, 1] {
        for k in (start..n.saturating_sub(1)).step_by(2) {
            let gate = dressed(core, rng);
            state.apply_two_qubit(&gate, k, k + 1)?;
        }
    }
    Ok(())
}

pub fn brickwall_layer<R: Rng + ?Sized>(
    state: &mut StateVector,
    cartan: &CartanCoeffs,
    rng: &mut R,
) -> Result<()> {
    let core = cartan_gate(cartan)?;
    brickwall_layer_with_core(state, &core, rng)
}

/// Measures each qubit in ascending order with probability `p`; returns how
/// many were measured.
pub fn measurement_layer<R: Rng + ?Sized>(
    state: &mut StateVector,
    p: f64,
    rng: &mut R,
) -> Result<usize> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
    }
    let mut count = 0;
    for q in 0..state.n_qubits() {
        // strict comparison so that p = 0 never measures and p = 1 always does
        let u: f64 = rng.gen();
        if u < p {
            state.measure_z(q, rng)?;
            count += 1;
        }
    }
    Ok(count)
}

/// Runs one trajectory from a Haar-random initial state. The entropy is
/// recorded after each measurement layer.
pub fn run_trajectory(config: &CircuitConfig) -> Result<TrajectoryRecord> {
    config.validate()?;
    let core = cartan_gate(&config.cartan)?;
    let mut rng = rng_from_seed(config.seed);
    let mut state = StateVector::haar_random_capped(config.n_qubits, config.max_qubits, &mut rng)?;
    let mut series = config
        .record_timeseries
        .then(|| Vec::with_capacity(config.t_steps));
    let mut n_measurements = 0;
    for _ in 0..config.t_steps {
        brickwall_layer_with_core(&mut state, &core, &mut rng)?;
        n_measurements += measurement_layer(&mut state, config.p, &mut rng)?;
        if let Some(s) = series.as_mut() {
            s.push(state.half_chain_entropy()?);
        }
    }
    let final_entropy = match series.as_ref().and_then(|s| s.last()) {
        Some(&s) => s,
        None => state.half_chain_entropy()?,
    };
    Ok(TrajectoryRecord {
        final_entropy,
        entropy_series: series,
        n_measurements,
        seed: config.seed,
    })
}

/// Parameters of an entropy-vs-p sweep at one system size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepParams {
    pub n_qubits: usize,
    pub cartan: CartanCoeffs,
    pub p_grid: Vec<f64>,
    pub n_traj: usize,
    pub t_steps: usize,
    pub master_seed: u64,
}

impl SweepParams {
    /// Seed of trajectory `traj` at grid index `p_idx`.
    pub fn trajectory_seed(&self, p_idx: usize, traj: usize) -> u64 {
        derive_seed(
            self.master_seed,
            &[self.n_qubits as u64, p_idx as u64, traj as u64],
        )
    }

    pub fn trajectory_config(&self, p_idx: usize, traj: usize) -> CircuitConfig {
        CircuitConfig {
            n_qubits: self.n_qubits,
            cartan: self.cartan,
            p: self.p_grid[p_idx],
            t_steps: self.t_steps,
            seed: self.trajectory_seed(p_idx, traj),
            record_timeseries: false,
            max_qubits: DEFAULT_MAX_QUBITS,
        }
    }
}

/// Final entropies of every trajectory, indexed `[p_idx][traj]`.
pub fn sweep_samples(params: &SweepParams, workers: usize) -> Result<Vec<Vec<f64>>> {
    if params.n_traj == 0 {
        return Err(Error::Domain("n_traj must be at least 1".into()));
    }
    if params.p_grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Domain("p grid values must lie in [0, 1]".into()));
    }
    params.trajectory_config(0, 0).validate()?;

    let tasks: Vec<(usize, usize)> = (0..params.p_grid.len())
        .flat_map(|i| (0..params.n_traj).map(move |t| (i, t)))
        .collect();
    let run = |&(i, t): &(usize, usize)| -> Result<f64> {
        run_trajectory(&params.trajectory_config(i, t)).map(|r| r.final_entropy)
    };
    let flat: Vec<f64> = if workers <= 1 {
        tasks.iter().map(run).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(run).collect::<Result<_>>())?
    };
    Ok(flat.chunks(params.n_traj).map(<[f64]>::to_vec).collect())
}

/// Mean final entropy, standard deviation and standard error at each `p`.
pub fn sweep(params: &SweepParams, workers: usize) -> Result<EntropyCurve> {
    let samples = sweep_samples(params, workers)?;
    Ok(EntropyCurve::from_samples(
        params.n_qubits,
        params.p_grid.clone(),
        &samples,
    ))
}
