//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use mipt_core::{CartanCoeffs, C64};
use nalgebra::{DMatrix, Matrix2};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn random_weyl_point<R: Rng>(rng: &mut R) -> CartanCoeffs {
    let c1 = rng.gen::<f64>() * FRAC_PI_2;
    let c2 = rng.gen::<f64>() * c1;
    let c3 = rng.gen::<f64>() * c2;
    CartanCoeffs::new(c1, c2, c3).unwrap()
}

/// Von Neumann entropy of the qubits in `subset` built directly from
/// `rho_A = Tr_B |psi><psi|`, with qubit 0 the most significant bit.
pub fn subset_entropy(amps: &[C64], n: usize, subset: &[usize]) -> f64 {
    let rest: Vec<usize> = (0..n).filter(|q| !subset.contains(q)).collect();
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let pack = |x: usize, qs: &[usize]| qs.iter().fold(0, |acc, &q| (acc << 1) | bit(x, q));
    let mut m = DMatrix::<C64>::zeros(1 << subset.len(), 1 << rest.len());
    for (x, a) in amps.iter().enumerate() {
        m[(pack(x, subset), pack(x, &rest))] = *a;
    }
    let rho = &m * m.adjoint();
    rho.symmetric_eigenvalues()
        .iter()
        .filter(|&&l| l > 1e-14)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Haar 2x2 unitary through `Q R` of a complex Gaussian matrix, fixing the
/// phases so that `R` has a positive diagonal.
pub fn haar_u2_via_qr<R: Rng>(rng: &mut R) -> Matrix2<C64> {
    let z = Matrix2::from_fn(|_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q;
    for k in 0..2 {
        let d = r[(k, k)];
        let phase = d / d.norm();
        for row in 0..2 {
            out[(row, k)] *= phase;
        }
    }
    out
}

/// Uniform single-qubit pure state.
pub fn random_qubit<R: Rng>(rng: &mut R) -> [C64; 2] {
    let a = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let b = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    [a / n, b / n]
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}
