//! Locating the transition from finite-size entropy curves.

mod collapse;
mod crossing;
pub mod interp;
mod regime;
mod simplex;

pub use crate::curve::EntropyCurve;
pub use collapse::{
    collapse_quality, collapsed_points, fit_collapse, CollapseData, CollapseFit,
    CollapseOptions, CollapsedPoint, INDISTINGUISHABLE_CHI2, MIN_COMPARABLE_POINTS,
};
pub use crossing::{crossing_estimate, CrossingEstimate};
pub use regime::{classify_regime, fit_size_scaling, Regime, RegimeFit};
pub use simplex::{nelder_mead, SimplexResult};

/// Default scan window for the critical probability.
pub const DEFAULT_P_C_RANGE: (f64, f64) = (0.05, 0.6);
/// Default scan window for the correlation-length exponent.
pub const DEFAULT_NU_RANGE: (f64, f64) = (0.5, 4.0);
