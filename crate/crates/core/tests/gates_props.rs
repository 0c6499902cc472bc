mod common;

use std::f64::consts::FRAC_PI_2;

use common::{haar_u2_via_qr, mean_and_se, random_qubit, random_weyl_point};
use mipt_core::gates::{
    cartan_from_invariants, cartan_gate, dress_gate, haar_su2, invariants_from_cartan,
    invariants_from_gate, is_feasible, operator_schmidt, MAX_ENTANGLING_POWER,
};
use mipt_core::rng::rng_from_seed;
use mipt_core::{CartanCoeffs, C64};
use nalgebra::{Matrix2, Vector4};
use rand::Rng;

#[test]
fn invariants_survive_local_dressing() {
    let mut rng = rng_from_seed(11);
    for _ in 0..100 {
        let c = random_weyl_point(&mut rng);
        let core = cartan_gate(&c).unwrap();
        let (a, b) = (haar_su2(&mut rng), haar_su2(&mut rng));
        let (x, y) = (haar_su2(&mut rng), haar_su2(&mut rng));
        let dressed = dress_gate(&core, &a, &b, &x, &y).unwrap();
        let (i0, i1) = (invariants_from_gate(&core), invariants_from_gate(&dressed));
        assert!((i0.e_p - i1.e_p).abs() < 1e-10 && (i0.g_t - i1.g_t).abs() < 1e-10);
        assert!((i0.e_u - i1.e_u).abs() < 1e-10 && (i0.e_us - i1.e_us).abs() < 1e-10);
    }
}

/// `1 - Tr rho_1^2` of `U |a>|b>`.
fn linear_entropy_of_output(u: &nalgebra::Matrix4<C64>, a: [C64; 2], b: [C64; 2]) -> f64 {
    let psi = u * Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]);
    let m = Matrix2::new(psi[0], psi[1], psi[2], psi[3]);
    let rho = m * m.adjoint();
    1.0 - (rho * rho).trace().re
}

#[test]
fn entangling_power_matches_product_state_average() {
    let mut rng = rng_from_seed(12);
    for _ in 0..10 {
        let c = random_weyl_point(&mut rng);
        let u = *cartan_gate(&c).unwrap().matrix();
        let samples: Vec<f64> = (0..10_000)
            .map(|_| {
                let (a, b) = (random_qubit(&mut rng), random_qubit(&mut rng));
                3.0 * linear_entropy_of_output(&u, a, b)
            })
            .collect();
        let (m, se) = mean_and_se(&samples);
        let e_p = invariants_from_cartan(&c).e_p;
        assert!((m - e_p).abs() < 3.0 * se, "{c:?}: {m} +- {se} vs {e_p}");
    }
}

#[test]
fn dual_and_t_dual_edges() {
    for k in 0..=20 {
        let t = k as f64 / 20.0 * FRAC_PI_2;
        let dual = invariants_from_gate(&cartan_gate(&CartanCoeffs::new(FRAC_PI_2, FRAC_PI_2, t).unwrap()).unwrap());
        assert!((dual.e_u - 0.75).abs() < 1e-10, "{dual:?}");
        assert!(dual.is_dual_unitary(1e-10));
        let t_dual = invariants_from_gate(&cartan_gate(&CartanCoeffs::new(t, 0.0, 0.0).unwrap()).unwrap());
        assert!((t_dual.e_us - 0.75).abs() < 1e-10, "{t_dual:?}");
        assert!(t_dual.is_t_dual(1e-10));
    }
}

#[test]
fn invariants_stay_in_range() {
    let mut rng = rng_from_seed(13);
    for _ in 0..10_000 {
        let c = random_weyl_point(&mut rng);
        let inv = invariants_from_cartan(&c);
        assert!(inv.e_p >= -1e-12 && inv.e_p <= MAX_ENTANGLING_POWER + 1e-12);
        assert!(inv.g_t >= -1e-12 && inv.g_t <= 1.0 + 1e-12);
        assert!(inv.e_u >= -1e-12 && inv.e_u <= 0.75 + 1e-12);
        assert!(inv.e_us >= -1e-12 && inv.e_us <= 0.75 + 1e-12);
        assert!(is_feasible(inv.e_p, inv.g_t));
    }
    for _ in 0..200 {
        let m = *cartan_gate(&random_weyl_point(&mut rng)).unwrap().matrix();
        let l = operator_schmidt(&m).lambdas;
        assert!((l.iter().sum::<f64>() - 4.0).abs() < 1e-9);
        assert!(l.windows(2).all(|w| w[0] >= w[1]) && l[3] >= -1e-12);
    }
}

#[test]
fn inverse_map_round_trip_over_plane_sample() {
    let mut rng = rng_from_seed(14);
    let mut accepted = 0;
    while accepted < 614 {
        let (e, g) = (rng.gen::<f64>() * MAX_ENTANGLING_POWER, rng.gen::<f64>());
        let Ok(c) = cartan_from_invariants(e, g) else { continue };
        accepted += 1;
        c.validate().unwrap();
        let inv = invariants_from_cartan(&c);
        assert!((inv.e_p - e).abs() < 1e-9 && (inv.g_t - g).abs() < 1e-9, "({e}, {g}) -> {c:?}");
        let via_gate = invariants_from_gate(&cartan_gate(&c).unwrap());
        assert!((via_gate.e_p - e).abs() < 1e-9 && (via_gate.g_t - g).abs() < 1e-9);
    }
}

#[test]
fn haar_su2_statistics() {
    let mut rng = rng_from_seed(15);
    let n = 100_000;
    let mut corner = Vec::with_capacity(n);
    let mut trace = Vec::with_capacity(n);
    let mut trace_ref = Vec::with_capacity(n);
    for _ in 0..n {
        let u = haar_su2(&mut rng);
        let id = u.adjoint() * u - Matrix2::identity();
        assert!(id.iter().all(|z| z.norm() < 1e-12));
        corner.push(u[(0, 0)].norm_sqr());
        trace.push(u.trace().norm_sqr() / 4.0);
        trace_ref.push(haar_u2_via_qr(&mut rng).trace().norm_sqr() / 4.0);
    }
    let (m, se) = mean_and_se(&corner);
    assert!((m - 0.5).abs() < 3.0 * se, "{m} +- {se}");
    // E|tr U|^2 = 1 for Haar U(2)
    let (mt, st) = mean_and_se(&trace);
    let (mr, sr) = mean_and_se(&trace_ref);
    assert!((mt - 0.25).abs() < 3.0 * st, "{mt} +- {st}");
    assert!((mr - 0.25).abs() < 3.0 * sr, "{mr} +- {sr}");
    assert!((mt - mr).abs() < 3.0 * (st * st + sr * sr).sqrt());
}
