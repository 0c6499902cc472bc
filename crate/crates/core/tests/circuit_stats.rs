mod common;

use std::f64::consts::LN_2;

use common::mean_and_se;
use mipt_core::analytics::page_entropy;
use mipt_core::circuit::{brickwall_layer, run_trajectory, sweep, CircuitConfig, SweepParams};
use mipt_core::rng::rng_from_seed;
use mipt_core::{CartanCoeffs, StateVector};

#[test]
fn one_layer_raises_cut_entropy_by_at_most_two_ln2() {
    let mut rng = rng_from_seed(31);
    for cartan in [CartanCoeffs::ISWAP, CartanCoeffs::CNOT, CartanCoeffs::swap_power(0.5).unwrap()] {
        for start in [StateVector::zero_state(8).unwrap(), StateVector::haar_random(8, &mut rng).unwrap()] {
            let mut s = start;
            let mut prev = s.half_chain_entropy().unwrap();
            for _ in 0..12 {
                brickwall_layer(&mut s, &cartan, &mut rng).unwrap();
                let e = s.half_chain_entropy().unwrap();
                assert!(e - prev <= 2.0 * LN_2 + 1e-10, "{prev} -> {e}");
                prev = e;
            }
        }
    }
}

#[test]
fn recorded_series_respects_growth_and_range_bounds() {
    for (k, cartan) in [CartanCoeffs::ISWAP, CartanCoeffs::CNOT].into_iter().enumerate() {
        let mut cfg = CircuitConfig::new(10, cartan, 0.0, 70 + k as u64);
        cfg.record_timeseries = true;
        let rec = run_trajectory(&cfg).unwrap();
        let series = rec.entropy_series.unwrap();
        assert_eq!(series.len(), 20);
        for w in series.windows(2) {
            assert!(w[1] - w[0] <= 2.0 * LN_2 + 1e-10);
        }
        assert!(series.iter().all(|&e| (0.0..=5.0 * LN_2 + 1e-10).contains(&e)));
    }
}

#[test]
fn iswap_scrambles_product_state_to_page_value() {
    let mut rng = rng_from_seed(32);
    let samples: Vec<f64> = (0..100)
        .map(|_| {
            let mut s = StateVector::zero_state(12).unwrap();
            for _ in 0..24 {
                brickwall_layer(&mut s, &CartanCoeffs::ISWAP, &mut rng).unwrap();
            }
            s.half_chain_entropy().unwrap()
        })
        .collect();
    let (m, _) = mean_and_se(&samples);
    let page = 6.0 * LN_2 - 0.5;
    assert!((m - page).abs() < 0.1 * page, "{m} vs {page}");
}

#[test]
fn unmeasured_circuit_keeps_page_value() {
    let page = page_entropy(6, 6).unwrap();
    let params = SweepParams {
        n_qubits: 12,
        cartan: CartanCoeffs::CNOT,
        p_grid: vec![0.0],
        n_traj: 1500,
        t_steps: 24,
        master_seed: 33,
    };
    let c = sweep(&params, 1).unwrap();
    assert!((c.mean_entropy[0] - page).abs() < 2.0 * c.std_err[0], "{c:?}");
}

#[test]
fn unmeasured_sweep_is_page_for_any_core() {
    let page = page_entropy(4, 4).unwrap();
    for (k, cartan) in [
        CartanCoeffs::IDENTITY,
        CartanCoeffs::SWAP,
        CartanCoeffs::ISWAP,
        CartanCoeffs::cnot_power(0.3).unwrap(),
    ]
    .into_iter()
    .enumerate()
    {
        let params = SweepParams {
            n_qubits: 8,
            cartan,
            p_grid: vec![0.0],
            n_traj: 1500,
            t_steps: 16,
            master_seed: 40 + k as u64,
        };
        let c = sweep(&params, 1).unwrap();
        // four simultaneous comparisons: 3 sigma each keeps the family at ~1% false alarms
        assert!((c.mean_entropy[0] - page).abs() < 3.0 * c.std_err[0], "{cartan:?}: {c:?}");
    }
}

#[test]
fn iswap_sustains_more_entropy_than_swap() {
    let run = |cartan, seed| {
        let params = SweepParams {
            n_qubits: 12,
            cartan,
            p_grid: vec![0.2],
            n_traj: 300,
            t_steps: 24,
            master_seed: seed,
        };
        sweep(&params, 1).unwrap()
    };
    let (i, s) = (run(CartanCoeffs::ISWAP, 50), run(CartanCoeffs::SWAP, 51));
    let gap = i.mean_entropy[0] - s.mean_entropy[0];
    let se = (i.std_err[0].powi(2) + s.std_err[0].powi(2)).sqrt();
    assert!(gap > 5.0 * se, "gap {gap}, se {se}");
}

#[test]
fn full_measurement_leaves_no_entropy() {
    let params = SweepParams {
        n_qubits: 8,
        cartan: CartanCoeffs::ISWAP,
        p_grid: vec![1.0],
        n_traj: 20,
        t_steps: 3,
        master_seed: 60,
    };
    let c = sweep(&params, 1).unwrap();
    assert_eq!(c.mean_entropy[0], 0.0);
    assert_eq!(c.std_dev[0], 0.0);
}
