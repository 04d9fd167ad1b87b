//! Elicitation of prior distributions for the mean and variance of a normal
//! population from an expert's judgements.
//!
//! The pipeline follows the facilitator's workflow:
//!
//! 1. plausible bounds `L`, `U` for a population member;
//! 2. quantiles of the population mean, fitted to a normal prior
//!    ([`fitting::fit_normal_from_two_quantiles`]);
//! 3. quantiles of the proportion θ of the population lying in `[m̂, m̂ + c]`,
//!    converted to σ² quantiles and fitted to an inverse-gamma prior
//!    ([`fitting::fit_variance_prior`]);
//! 4. Monte Carlo feedback on the implied population distribution
//!    ([`feedback`]).
//!
//! [`session`] wraps these steps in an event-sourced workflow record.

pub mod error;
pub mod feedback;
pub mod fitting;
pub mod numerics;
pub mod report;
pub mod session;
pub mod transforms;

pub use error::{ElicitError, Result};
