//! Dense statevector kernel.
//!
//! Basis convention: qubit 0 is the most significant bit of the basis index,
//! so for `L` qubits qubit `q` lives at bit position `L - 1 - q`. A two-qubit
//! gate applied to `(i, j)` sees the local basis `|b_i b_j>` ordered as
//! `00, 01, 10, 11`, with `b_i` the more significant local bit.

use nalgebra::{DMatrix, Matrix4};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;

/// Largest register accepted unless a caller raises the cap explicitly.
pub const DEFAULT_MAX_QUBITS: usize = 24;

/// Schmidt weights below this contribute nothing to the entropy.
const SPECTRUM_CUTOFF: f64 = 1e-14;

/// A 4x4 unitary acting on an ordered pair of qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitGate(Matrix4<C64>);

impl TwoQubitGate {
    pub const UNITARITY_TOL: f64 = 1e-10;

    /// Wraps `m` after checking `m^dagger m = I` entrywise.
    pub fn new(m: Matrix4<C64>) -> Result<Self> {
        let g = TwoQubitGate(m);
        if !g.is_unitary(Self::UNITARITY_TOL) {
            return Err(Error::Domain("two-qubit gate is not unitary".into()));
        }
        Ok(g)
    }

    pub fn from_matrix_unchecked(m: Matrix4<C64>) -> Self {
        TwoQubitGate(m)
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn identity() -> Self {
        TwoQubitGate(Matrix4::identity())
    }

    pub fn swap() -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(1, 2)] = C64::new(1.0, 0.0);
        m[(2, 1)] = C64::new(1.0, 0.0);
        m[(3, 3)] = C64::new(1.0, 0.0);
        TwoQubitGate(m)
    }

    /// CNOT with the first qubit of the pair as control.
    pub fn cnot() -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = C64::new(1.0, 0.0);
        m[(1, 1)] = C64::new(1.0, 0.0);
        m[(2, 3)] = C64::new(1.0, 0.0);
        m[(3, 2)] = C64::new(1.0, 0.0);
        TwoQubitGate(m)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let prod = self.0.adjoint() * self.0;
        let id = Matrix4::<C64>::identity();
        (prod - id).iter().all(|z| z.norm() <= tol)
    }

    /// Gate product `self * rhs` (apply `rhs` first).
    pub fn then_after(&self, rhs: &TwoQubitGate) -> TwoQubitGate {
        TwoQubitGate(self.0 * rhs.0)
    }

    fn as_rows(&self) -> [[C64; 4]; 4] {
        let mut rows = [[C64::new(0.0, 0.0); 4]; 4];
        for (r, row) in rows.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.0[(r, c)];
            }
        }
        rows
    }
}

/// Pure state of `n_qubits` qubits stored as `2^n_qubits` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

fn check_size(n_qubits: usize, max_qubits: usize) -> Result<()> {
    if n_qubits < 2 {
        return Err(Error::Size(format!("need at least 2 qubits, got {n_qubits}")));
    }
    if n_qubits > max_qubits {
        return Err(Error::Size(format!(
            "{n_qubits} qubits exceeds the memory cap of {max_qubits}"
        )));
    }
    Ok(())
}

#[inline(always)]
fn insert_zero_bit(x: usize, bit: usize) -> usize {
    let low = x & ((1usize << bit) - 1);
    ((x >> bit) << (bit + 1)) | low
}

/// Gate on bits `(lo + 1, lo)` with the higher bit as the first local qubit.
/// Each block of `4 * 2^lo` amplitudes splits into four contiguous runs.
fn apply_adjacent(amps: &mut [C64], m: &[[C64; 4]; 4], lo: usize) {
    let stride = 1usize << lo;
    for block in amps.chunks_exact_mut(4 * stride) {
        let (r0, rest) = block.split_at_mut(stride);
        let (r1, rest) = rest.split_at_mut(stride);
        let (r2, r3) = rest.split_at_mut(stride);
        for (((x0, x1), x2), x3) in r0.iter_mut().zip(r1).zip(r2).zip(r3) {
            let a = [*x0, *x1, *x2, *x3];
            *x0 = m[0][0] * a[0] + m[0][1] * a[1] + m[0][2] * a[2] + m[0][3] * a[3];
            *x1 = m[1][0] * a[0] + m[1][1] * a[1] + m[1][2] * a[2] + m[1][3] * a[3];
            *x2 = m[2][0] * a[0] + m[2][1] * a[1] + m[2][2] * a[2] + m[2][3] * a[3];
            *x3 = m[3][0] * a[0] + m[3][1] * a[1] + m[3][2] * a[2] + m[3][3] * a[3];
        }
    }
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        Self::basis_state(n_qubits, 0)
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        check_size(n_qubits, DEFAULT_MAX_QUBITS)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Size(format!("basis index {index} out of range")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Builds a state from raw amplitudes, renormalising them.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 4 || !dim.is_power_of_two() {
            return Err(Error::Size(format!(
                "amplitude count {dim} is not a power of two >= 4"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_size(n_qubits, DEFAULT_MAX_QUBITS)?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Numerical("cannot normalise a zero vector".into()));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(StateVector { n_qubits, amps })
    }

    /// Haar-random pure state: normalised vector of i.i.d. complex Gaussians.
    pub fn haar_random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        Self::haar_random_capped(n_qubits, DEFAULT_MAX_QUBITS, rng)
    }

    pub fn haar_random_capped<R: Rng + ?Sized>(
        n_qubits: usize,
        max_qubits: usize,
        rng: &mut R,
    ) -> Result<Self> {
        check_size(n_qubits, max_qubits)?;
        let dim = 1usize << n_qubits;
        let mut amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let inv = 1.0 / norm;
        amps.iter_mut().for_each(|a| *a *= inv);
        Ok(StateVector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    #[inline]
    fn bit_of(&self, q: usize) -> usize {
        self.n_qubits - 1 - q
    }

    /// Applies `gate` to qubits `(i, j)` in place.
    pub fn apply_two_qubit(&mut self, gate: &TwoQubitGate, i: usize, j: usize) -> Result<()> {
        let n = self.n_qubits;
        if i == j || i >= n || j >= n {
            return Err(Error::Index { i, j, n });
        }
        let (bi, bj) = (self.bit_of(i), self.bit_of(j));
        if bi == bj + 1 {
            apply_adjacent(&mut self.amps, &gate.as_rows(), bj);
            return Ok(());
        }
        let (lo, hi) = (bi.min(bj), bi.max(bj));
        let (mi, mj) = (1usize << bi, 1usize << bj);
        let m = gate.as_rows();
        let amps = &mut self.amps;
        for k in 0..amps.len() >> 2 {
            let base = insert_zero_bit(insert_zero_bit(k, lo), hi);
            let idx = [base, base | mj, base | mi, base | mi | mj];
            let a = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
            for (row, &target) in m.iter().zip(idx.iter()) {
                amps[target] = row[0] * a[0] + row[1] * a[1] + row[2] * a[2] + row[3] * a[3];
            }
        }
        Ok(())
    }

    /// Probability of reading `0` on qubit `q`.
    pub fn prob_zero(&self, q: usize) -> Result<f64> {
        let n = self.n_qubits;
        if q >= n {
            return Err(Error::Index { i: q, j: q, n });
        }
        let mask = 1usize << self.bit_of(q);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projective Pauli-Z measurement of qubit `q` with Born-rule sampling.
    /// Returns the outcome bit; the state collapses and is renormalised.
    pub fn measure_z<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<u8> {
        let n = self.n_qubits;
        if q >= n {
            return Err(Error::Index { i: q, j: q, n });
        }
        let mask = 1usize << self.bit_of(q);
        let (mut p0, mut p1) = (0.0, 0.0);
        for (idx, a) in self.amps.iter().enumerate() {
            if idx & mask == 0 {
                p0 += a.norm_sqr();
            } else {
                p1 += a.norm_sqr();
            }
        }
        if p0 < 1e-14 && p1 < 1e-14 {
            return Err(Error::Numerical(format!(
                "both outcome probabilities vanish on qubit {q} ({p0:e}, {p1:e})"
            )));
        }
        let u: f64 = rng.gen();
        let outcome = if u * (p0 + p1) < p0 { 0u8 } else { 1u8 };
        let (keep, p_keep) = if outcome == 0 { (0, p0) } else { (mask, p1) };
        let scale = 1.0 / p_keep.sqrt();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            if idx & mask == keep {
                *a *= scale;
            } else {
                *a = C64::new(0.0, 0.0);
            }
        }
        Ok(outcome)
    }

    /// Schmidt weights across the cut `[0, L/2) | [L/2, L)`, descending.
    pub fn half_chain_spectrum(&self) -> Result<Vec<f64>> {
        let n = self.n_qubits;
        if n % 2 != 0 {
            return Err(Error::Bipartition(n));
        }
        let d = 1usize << (n / 2);
        // amplitude matrix M[a, b] = amps[a * d + b]; Gram = M M^dagger
        let mut gram = DMatrix::<C64>::zeros(d, d);
        for a in 0..d {
            let row_a = &self.amps[a * d..(a + 1) * d];
            for a2 in a..d {
                let row_b = &self.amps[a2 * d..(a2 + 1) * d];
                let mut acc = C64::new(0.0, 0.0);
                for (x, y) in row_a.iter().zip(row_b) {
                    acc += x * y.conj();
                }
                gram[(a, a2)] = acc;
                gram[(a2, a)] = acc.conj();
            }
        }
        let mut spectrum: Vec<f64> = gram
            .symmetric_eigenvalues()
            .iter()
            .map(|&l| l.max(0.0))
            .collect();
        spectrum.sort_by(|x, y| y.total_cmp(x));
        Ok(spectrum)
    }

    /// Von Neumann entropy (nats) of the first half of the chain.
    pub fn half_chain_entropy(&self) -> Result<f64> {
        Ok(entropy_of_spectrum(&self.half_chain_spectrum()?))
    }
}

/// `-sum l ln l` over weights above the cutoff. A weight within the cutoff
/// of 1 leaves nothing for the others, so it counts as a product state.
pub fn entropy_of_spectrum(weights: &[f64]) -> f64 {
    weights
        .iter()
        .filter(|&&l| l > SPECTRUM_CUTOFF && l < 1.0 - SPECTRUM_CUTOFF)
        .map(|&l| -l * l.ln())
        .sum::<f64>()
        .max(0.0)
}
