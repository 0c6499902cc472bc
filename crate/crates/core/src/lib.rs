//! Dense statevector simulation of brick-wall hybrid circuits built from a
//! fixed two-qubit interaction core, together with the gate invariants,
//! closed-form measurement-only entropies and the finite-size scaling tools
//! used to locate the measurement-induced transition.

pub mod analytics;
pub mod circuit;
pub mod curve;
pub mod error;
pub mod gates;
pub mod qstate;
pub mod rng;
pub mod scaling;

pub use curve::EntropyCurve;
pub use error::{Error, Result};
pub use gates::{CartanCoeffs, GateInvariants, SchmidtSpectrum};
pub use qstate::{StateVector, TwoQubitGate, C64};
