//! Special functions and distribution primitives.
//!
//! Everything here is pure and allocation-free. Probabilities are plain `f64`
//! in [0, 1]; percentages are only accepted at the interface edges.

mod dist;
mod solve;
pub mod special;

pub use dist::{
    dist_pdf, invgamma_cdf, invgamma_quantile, normal_cdf, normal_quantile, BetaParams,
    ContinuousDist, Distribution, GammaParams, InverseGammaParams, LogNormalParams,
    NormalParams, PrecisionFamily, PrecisionFamilyTag,
};
pub(crate) use dist::check_probability;

