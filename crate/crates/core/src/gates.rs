//! Cartan-parameterised two-qubit gates and their local-unitary invariants.
//!
//! The interaction core is `exp(-(i/2) sum_j c_j sigma_j (x) sigma_j)` with
//! `(c1, c2, c3)` in the Weyl chamber. Two invariants place every core on the
//! entangling-power / gate-typicality plane; on the chamber faces `c3 = 0`
//! and `c1 = c2` the map back to coefficients is closed form, and together
//! those two faces reach every permissible point of the plane.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::{Matrix2, Matrix4};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{TwoQubitGate, C64};

/// Operator entanglement of SWAP for qubits, `1 - 1/d^2`.
pub const E_SWAP: f64 = 0.75;

/// Maximum entangling power of a two-qubit gate.
pub const MAX_ENTANGLING_POWER: f64 = 2.0 / 3.0;

const WEYL_TOL: f64 = 1e-12;
const ROOT_TOL: f64 = 1e-12;

/// Interaction-core angles, ordered `0 <= c3 <= c2 <= c1 <= pi/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CartanCoeffs {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CartanCoeffs {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        let c = CartanCoeffs { c1, c2, c3 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let CartanCoeffs { c1, c2, c3 } = *self;
        let ordered = c3 >= -WEYL_TOL
            && c2 - c3 >= -WEYL_TOL
            && c1 - c2 >= -WEYL_TOL
            && c1 <= FRAC_PI_2 + WEYL_TOL;
        if !ordered || ![c1, c2, c3].iter().all(|c| c.is_finite()) {
            return Err(Error::Domain(format!(
                "Cartan coefficients ({c1}, {c2}, {c3}) violate 0 <= c3 <= c2 <= c1 <= pi/2"
            )));
        }
        Ok(())
    }

    pub const IDENTITY: CartanCoeffs = CartanCoeffs { c1: 0.0, c2: 0.0, c3: 0.0 };
    pub const CNOT: CartanCoeffs = CartanCoeffs { c1: FRAC_PI_2, c2: 0.0, c3: 0.0 };
    pub const ISWAP: CartanCoeffs = CartanCoeffs { c1: FRAC_PI_2, c2: FRAC_PI_2, c3: 0.0 };
    pub const SWAP: CartanCoeffs = CartanCoeffs { c1: FRAC_PI_2, c2: FRAC_PI_2, c3: FRAC_PI_2 };

    /// `SWAP^alpha`: `c1 = c2 = c3 = alpha pi/2`.
    pub fn swap_power(alpha: f64) -> Result<Self> {
        let c = alpha * FRAC_PI_2;
        Self::new(c, c, c)
    }

    /// `CNOT^alpha` on the T-dual edge: `c1 = alpha pi/2`, `c2 = c3 = 0`.
    pub fn cnot_power(alpha: f64) -> Result<Self> {
        Self::new(alpha * FRAC_PI_2, 0.0, 0.0)
    }

    /// `CNOT^(1-alpha) iSWAP^alpha`: `c1 = pi/2, c2 = alpha pi/2, c3 = 0`.
    pub fn cnot_to_iswap(alpha: f64) -> Result<Self> {
        Self::new(FRAC_PI_2, alpha * FRAC_PI_2, 0.0)
    }

    /// `SWAP^alpha iSWAP^(1-alpha)` on the dual-unitary edge: `c3 = alpha pi/2`.
    pub fn swap_to_iswap(alpha: f64) -> Result<Self> {
        Self::new(FRAC_PI_2, FRAC_PI_2, alpha * FRAC_PI_2)
    }
}

/// Builds the interaction core in closed form from its Bell-basis spectrum.
///
/// The Bell states diagonalise `XX`, `YY` and `ZZ` simultaneously with
/// eigenvalues `Phi+: (+,-,+)`, `Phi-: (-,+,+)`, `Psi+: (+,+,-)`,
/// `Psi-: (-,-,-)`.
pub fn cartan_gate(c: &CartanCoeffs) -> Result<TwoQubitGate> {
    c.validate()?;
    let s = FRAC_1_SQRT_2;
    let bell: [([f64; 4], [f64; 3]); 4] = [
        ([s, 0.0, 0.0, s], [1.0, -1.0, 1.0]),
        ([s, 0.0, 0.0, -s], [-1.0, 1.0, 1.0]),
        ([0.0, s, s, 0.0], [1.0, 1.0, -1.0]),
        ([0.0, s, -s, 0.0], [-1.0, -1.0, -1.0]),
    ];
    let mut m = Matrix4::<C64>::zeros();
    for (v, ev) in &bell {
        let phase = -0.5 * (c.c1 * ev[0] + c.c2 * ev[1] + c.c3 * ev[2]);
        let e = C64::from_polar(1.0, phase);
        for r in 0..4 {
            for col in 0..4 {
                m[(r, col)] += e * (v[r] * v[col]);
            }
        }
    }
    Ok(TwoQubitGate::from_matrix_unchecked(m))
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random 2x2 unitary: Gram-Schmidt on a complex Gaussian matrix,
/// which equals QR with the diagonal of R made real positive.
pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Matrix2<C64> {
    let (a, b) = (gaussian_c64(rng), gaussian_c64(rng));
    let (c, d) = (gaussian_c64(rng), gaussian_c64(rng));
    // columns (a, b) and (c, d)
    let n1 = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (q00, q10) = (a / n1, b / n1);
    let proj = q00.conj() * c + q10.conj() * d;
    let (r0, r1) = (c - proj * q00, d - proj * q10);
    let n2 = (r0.norm_sqr() + r1.norm_sqr()).sqrt();
    Matrix2::new(q00, r0 / n2, q10, r1 / n2)
}

fn is_unitary2(u: &Matrix2<C64>, tol: f64) -> bool {
    let prod = u.adjoint() * u;
    (prod - Matrix2::<C64>::identity()).iter().all(|z| z.norm() <= tol)
}

/// Kronecker product `a (x) b` with `a` on the more significant qubit.
pub fn kron2(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r >> 1, c >> 1)] * b[(r & 1, c & 1)])
}

/// `(w_k (x) w_k1) core (u_k (x) u_k1)`.
pub fn dress_gate(
    core: &TwoQubitGate,
    u_k: &Matrix2<C64>,
    u_k1: &Matrix2<C64>,
    w_k: &Matrix2<C64>,
    w_k1: &Matrix2<C64>,
) -> Result<TwoQubitGate> {
    if ![u_k, u_k1, w_k, w_k1]
        .iter()
        .all(|u| is_unitary2(u, TwoQubitGate::UNITARITY_TOL))
    {
        return Err(Error::Domain("local dressing is not unitary".into()));
    }
    Ok(dress_gate_unchecked(core, u_k, u_k1, w_k, w_k1))
}

pub(crate) fn dress_gate_unchecked(
    core: &TwoQubitGate,
    u_k: &Matrix2<C64>,
    u_k1: &Matrix2<C64>,
    w_k: &Matrix2<C64>,
    w_k1: &Matrix2<C64>,
) -> TwoQubitGate {
    let m = kron2(w_k, w_k1) * core.matrix() * kron2(u_k, u_k1);
    TwoQubitGate::from_matrix_unchecked(m)
}

/// Operator Schmidt coefficients `lambda_i` (squared singular values of the
/// realigned matrix), sorted descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtSpectrum {
    pub lambdas: [f64; 4],
}

/// Realignment `R[(a,c),(b,d)] = U[(a,b),(c,d)]`.
pub fn realign(m: &Matrix4<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|row, col| {
        let (a, c) = (row >> 1, row & 1);
        let (b, d) = (col >> 1, col & 1);
        m[(2 * a + b, 2 * c + d)]
    })
}

pub fn operator_schmidt(m: &Matrix4<C64>) -> SchmidtSpectrum {
    let sv = realign(m).singular_values();
    let mut lambdas = [0.0; 4];
    for (l, s) in lambdas.iter_mut().zip(sv.iter()) {
        *l = s * s;
    }
    lambdas.sort_by(|x, y| y.total_cmp(x));
    SchmidtSpectrum { lambdas }
}

/// `E(U) = 1 - sum lambda_i^2 / 16`.
pub fn linear_operator_entanglement(gate: &TwoQubitGate) -> f64 {
    let spec = operator_schmidt(gate.matrix());
    1.0 - spec.lambdas.iter().map(|l| l * l).sum::<f64>() / 16.0
}

/// Entangling power, gate typicality and the two operator entanglements
/// they are built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateInvariants {
    pub e_p: f64,
    pub g_t: f64,
    pub e_u: f64,
    pub e_us: f64,
}

impl GateInvariants {
    fn from_operator_entanglements(e_u: f64, e_us: f64) -> Self {
        GateInvariants {
            e_p: (e_u + e_us - E_SWAP) / E_SWAP,
            g_t: (e_u - e_us + E_SWAP) / (2.0 * E_SWAP),
            e_u,
            e_us,
        }
    }

    /// Maximal operator entanglement (SWAP to iSWAP edge).
    pub fn is_dual_unitary(&self, tol: f64) -> bool {
        (self.e_u - E_SWAP).abs() <= tol
    }

    /// Maximal `E(U S)` (identity to CNOT edge).
    pub fn is_t_dual(&self, tol: f64) -> bool {
        (self.e_us - E_SWAP).abs() <= tol
    }
}

pub fn invariants_from_gate(gate: &TwoQubitGate) -> GateInvariants {
    let e_u = linear_operator_entanglement(gate);
    let e_us = linear_operator_entanglement(&gate.then_after(&TwoQubitGate::swap()));
    GateInvariants::from_operator_entanglements(e_u, e_us)
}

pub fn invariants_from_cartan(c: &CartanCoeffs) -> GateInvariants {
    let (s1, s2, s3) = (c.c1.sin().powi(2), c.c2.sin().powi(2), c.c3.sin().powi(2));
    let (k1, k2, k3) = (1.0 - s1, 1.0 - s2, 1.0 - s3);
    let e_p = 2.0 / 3.0 * (s1 * k2 + s2 * k3 + s3 * k1);
    let g_t = (s1 + s2 + s3) / 3.0;
    // invert e_p = (E_U + E_US - E_S)/E_S and g_t = (E_U - E_US + E_S)/(2 E_S)
    let sum = E_SWAP * (e_p + 1.0);
    let diff = E_SWAP * (2.0 * g_t - 1.0);
    GateInvariants {
        e_p,
        g_t,
        e_u: 0.5 * (sum + diff),
        e_us: 0.5 * (sum - diff),
    }
}

/// Roots of `x^2 - sum x + prod`, larger first, if both lie in `[0, 1]`
/// up to the clamping tolerance.
fn unit_interval_roots(sum: f64, prod: f64) -> Option<(f64, f64)> {
    let disc = sum * sum - 4.0 * prod;
    if disc < -ROOT_TOL {
        return None;
    }
    let r = disc.max(0.0).sqrt();
    let (hi, lo) = (0.5 * (sum + r), 0.5 * (sum - r));
    in_unit(hi).zip(in_unit(lo))
}

fn in_unit(x: f64) -> Option<f64> {
    (-ROOT_TOL..=1.0 + ROOT_TOL)
        .contains(&x)
        .then(|| x.clamp(0.0, 1.0))
}

fn angle_from_sin_sq(s: f64) -> f64 {
    s.sqrt().asin()
}

/// Faces of the Weyl chamber with a closed-form inverse of the invariant map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeylFace {
    /// `c3 = 0`: the I / CNOT / iSWAP triangle.
    C3Zero,
    /// `c1 = c2`: the I / iSWAP / SWAP triangle.
    C1EqC2,
    /// `c1 = pi/2`: the CNOT / iSWAP / SWAP triangle.
    C1HalfPi,
}

/// Faces searched by [`cartan_from_invariants`], in order of preference.
/// Their images jointly cover the whole permissible region.
pub const SAMPLED_FACES: [WeylFace; 2] = [WeylFace::C3Zero, WeylFace::C1EqC2];

impl WeylFace {
    /// The unique point on this face with invariants `(e_p, g_t)`, if any.
    pub fn solve(self, e_p: f64, g_t: f64) -> Option<CartanCoeffs> {
        match self {
            WeylFace::C3Zero => {
                // a = sin^2 c1, b = sin^2 c2: a + b = 3 g_t, a b = 3 g_t - 3 e_p / 2
                let (a, b) = unit_interval_roots(3.0 * g_t, 3.0 * g_t - 1.5 * e_p)?;
                Some(CartanCoeffs {
                    c1: angle_from_sin_sq(a),
                    c2: angle_from_sin_sq(b),
                    c3: 0.0,
                })
            }
            WeylFace::C1EqC2 => {
                // a = sin^2 c1 = sin^2 c2, s = sin^2 c3: a^2 - 2 g_t a + g_t - e_p/2 = 0,
                // s = 3 g_t - 2a, and s <= a selects the larger root
                let disc = g_t * g_t - g_t + 0.5 * e_p;
                if disc < -ROOT_TOL {
                    return None;
                }
                let r = disc.max(0.0).sqrt();
                let a = in_unit(g_t + r)?;
                let s = in_unit(g_t - 2.0 * r)?;
                let (c1, c3) = (angle_from_sin_sq(a), angle_from_sin_sq(s));
                Some(CartanCoeffs { c1, c2: c1, c3: c3.min(c1) })
            }
            WeylFace::C1HalfPi => {
                // b = sin^2 c2, s = sin^2 c3: b + s = 3 g_t - 1, b s = 1 - 3 e_p / 2
                let (b, s) = unit_interval_roots(3.0 * g_t - 1.0, 1.0 - 1.5 * e_p)?;
                Some(CartanCoeffs {
                    c1: FRAC_PI_2,
                    c2: angle_from_sin_sq(b),
                    c3: angle_from_sin_sq(s),
                })
            }
        }
    }
}

/// Cartan coefficients on the sampled faces (`c3 = 0` preferred, then
/// `c1 = c2`) realising the requested invariants.
pub fn cartan_from_invariants(e_p: f64, g_t: f64) -> Result<CartanCoeffs> {
    if !(e_p.is_finite() && g_t.is_finite()) {
        return Err(Error::OutsideRegion { e_p, g_t });
    }
    SAMPLED_FACES
        .iter()
        .find_map(|face| face.solve(e_p, g_t))
        .ok_or(Error::OutsideRegion { e_p, g_t })
}

/// Whether `(e_p, g_t)` is realised by some gate on the two sampled faces.
pub fn is_feasible(e_p: f64, g_t: f64) -> bool {
    cartan_from_invariants(e_p, g_t).is_ok()
}

/// `min_phi ||a - e^{i phi} b||_F`.
pub fn phase_distance(a: &Matrix4<C64>, b: &Matrix4<C64>) -> f64 {
    let overlap: C64 = (b.adjoint() * a).trace();
    let d2 = a.norm_squared() + b.norm_squared() - 2.0 * overlap.norm();
    d2.max(0.0).sqrt()
}
