//! Closed-form entropies for the measurement-only circuit.
//!
//! With an identity interaction core every measured qubit stays a product
//! factor forever, while the unmeasured survivors remain Haar random. The
//! expected half-chain entropy is then a binomial mixture of Page values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const EXACT_HARMONIC_LIMIT: u128 = 1 << 16;

/// `H_n = sum_{k=1}^n 1/k`; exact up to 2^16, asymptotic beyond.
fn harmonic(n: u128) -> f64 {
    if n <= EXACT_HARMONIC_LIMIT {
        (1..=n as u64).rev().map(|k| 1.0 / k as f64).sum()
    } else {
        let x = n as f64;
        let inv2 = 1.0 / (x * x);
        x.ln() + EULER_GAMMA + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0
    }
}

/// Average entanglement entropy (nats) of a Haar-random pure state on
/// `n_a + n_b` qubits across the `n_a | n_b` cut:
/// `sum_{k=2^max+1}^{2^(n_a+n_b)} 1/k - (2^min - 1) / 2^(max+1)`.
pub fn page_entropy(n_a: i64, n_b: i64) -> Result<f64> {
    if n_a < 0 || n_b < 0 {
        return Err(Error::Domain(format!(
            "Page entropy needs non-negative sizes, got ({n_a}, {n_b})"
        )));
    }
    let (lo, hi) = (n_a.min(n_b) as u32, n_a.max(n_b) as u32);
    if lo == 0 {
        return Ok(0.0);
    }
    if lo + hi > 120 {
        return Err(Error::Domain(format!("Page entropy for {} qubits overflows", lo + hi)));
    }
    let d_hi = 1u128 << hi;
    let total = 1u128 << (lo + hi);
    let sum = harmonic(total) - harmonic(d_hi);
    let correction = ((1u128 << lo) - 1) as f64 / (2.0 * d_hi as f64);
    Ok((sum - correction).max(0.0))
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (1..=k)
        .map(|i| ((n - k + i) as f64).ln() - (i as f64).ln())
        .sum()
}

/// Probability that exactly `n_kept` of `n` qubits survive `t` measurement
/// layers at rate `p`: `C(n, n_kept) q^n_kept (1-q)^(n-n_kept)`, `q = (1-p)^t`.
pub fn unmeasured_probability(n: u32, n_kept: u32, p: f64, t: u32) -> Result<f64> {
    if n_kept > n {
        return Err(Error::Domain(format!("n_kept = {n_kept} exceeds N = {n}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
    }
    let q = survival_probability(p, t);
    Ok(binomial_pmf(n, n_kept, q))
}

fn survival_probability(p: f64, t: u32) -> f64 {
    (1.0 - p).powi(t as i32)
}

fn binomial_pmf(n: u32, k: u32, q: f64) -> f64 {
    // powi(0) == 1 covers the 0^0 corners at q = 0 and q = 1
    ln_binomial(n, k).exp() * q.powi(k as i32) * (1.0 - q).powi((n - k) as i32)
}

/// Parameters of the measurement-only estimate: `n_half = L/2` qubits per
/// half, measurement rate `p`, `t` layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementOnlyParams {
    pub n_half: u32,
    pub p: f64,
    pub t: u32,
}

impl MeasurementOnlyParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_half == 0 || self.n_half > 64 {
            return Err(Error::Domain(format!("N = {} outside 1..=64", self.n_half)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Domain(format!("p = {} outside [0, 1]", self.p)));
        }
        Ok(())
    }
}

/// Expected half-chain entropy of the identity-core circuit.
pub fn measurement_only_entropy(params: &MeasurementOnlyParams) -> Result<f64> {
    params.validate()?;
    let n = params.n_half;
    let q = survival_probability(params.p, params.t);
    let weights: Vec<f64> = (0..=n).map(|k| binomial_pmf(n, k, q)).collect();
    let mut total = 0.0;
    for (a, wa) in weights.iter().enumerate() {
        if *wa == 0.0 {
            continue;
        }
        for (b, wb) in weights.iter().enumerate() {
            if *wb == 0.0 {
                continue;
            }
            total += page_entropy(a as i64, b as i64)? * wa * wb;
        }
    }
    Ok(total)
}

/// Large-N mean number of survivors per half at `t = 4N`: `N e^{-4Np}`.
pub fn unmeasured_mean_asymptote(n: u32, p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::Domain(format!("p = {p} must be non-negative")));
    }
    let n = n as f64;
    Ok(n * (-4.0 * n * p).exp())
}

/// Exact mean number of survivors per half, `N (1-p)^t`.
pub fn unmeasured_mean_exact(n: u32, p: f64, t: u32) -> f64 {
    n as f64 * survival_probability(p, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn page_small_cases() {
        assert_eq!(page_entropy(0, 5).unwrap(), 0.0);
        assert_eq!(page_entropy(3, 0).unwrap(), 0.0);
        assert!((page_entropy(1, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        // 1|2: sum_{5..8} 1/k - 1/8
        let direct = 1.0 / 5.0 + 1.0 / 6.0 + 1.0 / 7.0 + 1.0 / 8.0 - 1.0 / 8.0;
        assert!((page_entropy(1, 2).unwrap() - direct).abs() < 1e-15);
        assert!(page_entropy(-1, 2).is_err());
    }

    #[test]
    fn page_half_chain_approaches_asymptote() {
        let s = page_entropy(6, 6).unwrap();
        assert!((s - (6.0 * LN_2 - 0.5)).abs() < 0.01, "{s}");
        // the asymptotic branch agrees with direct summation at the switch-over
        let direct: f64 = (513..=(1u64 << 17)).rev().map(|k| 1.0 / k as f64).sum::<f64>()
            - 255.0 / 1024.0;
        assert!((page_entropy(8, 9).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn page_symmetry_and_positivity() {
        for a in 0..8 {
            for b in 0..8 {
                let x = page_entropy(a, b).unwrap();
                assert_eq!(x, page_entropy(b, a).unwrap());
                assert!(x >= 0.0);
                assert!(x <= a.min(b) as f64 * LN_2 + 1e-12);
            }
        }
    }

    #[test]
    fn survival_distribution_edges() {
        for k in 0..=5 {
            let p0 = unmeasured_probability(5, k, 0.0, 7).unwrap();
            assert_eq!(p0, if k == 5 { 1.0 } else { 0.0 });
            let p1 = unmeasured_probability(5, k, 1.0, 3).unwrap();
            assert_eq!(p1, if k == 0 { 1.0 } else { 0.0 });
        }
        assert!(unmeasured_probability(3, 4, 0.1, 1).is_err());
    }

    #[test]
    fn survival_distribution_normalised() {
        for &(n, p, t) in &[(1u32, 0.3, 1u32), (5, 0.1, 10), (8, 0.05, 32), (20, 0.4, 3)] {
            let total: f64 = (0..=n).map(|k| unmeasured_probability(n, k, p, t).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn measurement_only_endpoints() {
        let p0 = MeasurementOnlyParams { n_half: 5, p: 0.0, t: 10 };
        assert_eq!(
            measurement_only_entropy(&p0).unwrap(),
            page_entropy(5, 5).unwrap()
        );
        let p1 = MeasurementOnlyParams { n_half: 5, p: 1.0, t: 10 };
        assert_eq!(measurement_only_entropy(&p1).unwrap(), 0.0);
    }

    #[test]
    fn measurement_only_monotone() {
        for n in 1..=6 {
            let mut prev = f64::INFINITY;
            for i in 0..=40 {
                let p = i as f64 / 40.0;
                let s = measurement_only_entropy(&MeasurementOnlyParams { n_half: n, p, t: 10 })
                    .unwrap();
                assert!(s >= 0.0 && s <= prev + 1e-14);
                prev = s;
            }
            for &p in &[0.02, 0.1, 0.3] {
                let mut prev = f64::INFINITY;
                for t in 0..30 {
                    let s = measurement_only_entropy(&MeasurementOnlyParams { n_half: n, p, t })
                        .unwrap();
                    assert!(s <= prev + 1e-14);
                    prev = s;
                }
            }
        }
    }

    /// Sums over every measured/unmeasured pattern of the 2N qubits.
    fn enumerate_patterns(n: u32, p: f64, t: u32) -> f64 {
        let q = (1.0 - p).powi(t as i32);
        let mut total = 0.0;
        for mask in 0u32..(1 << (2 * n)) {
            let kept_a = (mask & ((1 << n) - 1)).count_ones();
            let kept_b = (mask >> n).count_ones();
            let kept = kept_a + kept_b;
            let weight = q.powi(kept as i32) * (1.0 - q).powi((2 * n - kept) as i32);
            total += weight * page_entropy(kept_a as i64, kept_b as i64).unwrap();
        }
        total
    }

    #[test]
    fn matches_pattern_enumeration() {
        for n in 1..=3 {
            for &p in &[0.0, 0.05, 0.2, 0.5, 0.9, 1.0] {
                for &t in &[1u32, 2, 5, 10] {
                    let closed =
                        measurement_only_entropy(&MeasurementOnlyParams { n_half: n, p, t })
                            .unwrap();
                    let brute = enumerate_patterns(n, p, t);
                    assert!((closed - brute).abs() < 1e-12, "N={n} p={p} t={t}");
                }
            }
        }
    }

    #[test]
    fn survivor_mean_asymptote() {
        assert_eq!(unmeasured_mean_asymptote(8, 0.0).unwrap(), 8.0);
        let asym = unmeasured_mean_asymptote(8, 0.1).unwrap();
        let exact = unmeasured_mean_exact(8, 0.1, 32);
        assert!((asym - 8.0 * (-3.2f64).exp()).abs() < 1e-12);
        assert!((exact - 8.0 * 0.9f64.powi(32)).abs() < 1e-12);
        assert!(asym / exact < 1.25 && asym / exact > 1.0);
        // ratio -> 1 at fixed N p
        let mut prev = asym / exact;
        for n in [16u32, 64, 256, 1024] {
            let p = 0.8 / n as f64;
            let r = unmeasured_mean_asymptote(n, p).unwrap() / unmeasured_mean_exact(n, p, 4 * n);
            assert!(r < prev);
            prev = r;
        }
        assert!((prev - 1.0).abs() < 2e-3);
        let mean: f64 = (0..=8)
            .map(|k| k as f64 * unmeasured_probability(8, k, 0.1, 32).unwrap())
            .sum();
        assert!((mean - exact).abs() < 1e-12);
    }
}
