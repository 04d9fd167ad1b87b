//! Monotone transforms g under which the population is taken to be normal.
//!
//! Judgements about the location are made on the original (observable)
//! scale; the variance machinery works on the transformed scale.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ElicitError, Result};
use crate::fitting::{check_increasing, fit_location_family, LocationFamily, LocationPrior, QuantileJudgement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transform {
    #[default]
    Identity,
    /// g(x) = ln x, for positive, right-skewed quantities.
    Log,
    /// g(x) = ln(x / (1 − x)), for proportions.
    Logit,
}

impl FromStr for Transform {
    type Err = ElicitError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" | "none" => Ok(Self::Identity),
            "log" => Ok(Self::Log),
            "logit" => Ok(Self::Logit),
            other => Err(ElicitError::InvalidTransform(format!(
                "unknown transform '{other}' (expected identity, log or logit)"
            ))),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Identity => "identity",
            Self::Log => "log",
            Self::Logit => "logit",
        })
    }
}

impl Transform {
    /// Open support interval on the original scale.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Identity => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Log => (0.0, f64::INFINITY),
            Self::Logit => (0.0, 1.0),
        }
    }

    pub fn in_support(&self, x: f64) -> bool {
        let (lo, hi) = self.support();
        x.is_finite() && x > lo && x < hi
    }

    pub fn check_support(&self, x: f64) -> Result<()> {
        if self.in_support(x) {
            Ok(())
        } else {
            let (lo, hi) = self.support();
            Err(ElicitError::domain(format!(
                "{x} is outside the support ({lo}, {hi}) of the {self} transform"
            )))
        }
    }

    /// g(x).
    pub fn apply(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        Ok(self.forward(x))
    }

    pub(crate) fn forward(&self, x: f64) -> f64 {
        match self {
            Self::Identity => x,
            Self::Log => x.ln(),
            Self::Logit => (x / (1.0 - x)).ln(),
        }
    }

    /// g⁻¹(y); defined for every real y.
    pub fn invert(&self, y: f64) -> f64 {
        match self {
            Self::Identity => y,
            Self::Log => y.exp(),
            Self::Logit => {
                // written to stay accurate in both tails
                if y >= 0.0 {
                    1.0 / (1.0 + (-y).exp())
                } else {
                    let e = y.exp();
                    e / (1.0 + e)
                }
            }
        }
    }

    /// g′(x), used to carry transformed-scale densities back to the original scale.
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Self::Identity => 1.0,
            Self::Log => 1.0 / x,
            Self::Logit => 1.0 / (x * (1.0 - x)),
        }
    }

    /// The location family whose fit on the original scale corresponds to a
    /// normal on the transformed scale, where there is one.
    pub fn natural_family(&self) -> Option<LocationFamily> {
        match self {
            Self::Identity => Some(LocationFamily::Normal),
            Self::Log => Some(LocationFamily::LogNormal),
            Self::Logit => None,
        }
    }
}

pub fn apply(t: Transform, x: f64) -> Result<f64> {
    t.apply(x)
}

pub fn invert(t: Transform, y: f64) -> f64 {
    t.invert(y)
}

/// The interval `[k1, k2] = [g⁻¹(m̂), g⁻¹(m̂ + c)]` that the proportion question
/// refers to, on the original scale.
pub fn variance_interval_endpoints(m_hat: f64, c: f64, t: Transform) -> Result<(f64, f64)> {
    if !(c.is_finite() && c > 0.0) {
        return Err(ElicitError::domain(format!("interval width c must be > 0, got {c}")));
    }
    if !m_hat.is_finite() {
        return Err(ElicitError::domain("anchor must be finite"));
    }
    let (k1, k2) = (t.invert(m_hat), t.invert(m_hat + c));
    if !(k1 < k2) {
        // logit saturates for very large arguments
        return Err(ElicitError::domain(format!(
            "interval [{k1}, {k2}] collapses on the original scale"
        )));
    }
    Ok((k1, k2))
}

/// Inverse of [`variance_interval_endpoints`]: `(m̂, c) = (g(k1), g(k2) − g(k1))`.
pub fn anchor_and_width(k1: f64, k2: f64, t: Transform) -> Result<(f64, f64)> {
    if !(k1 < k2) {
        return Err(ElicitError::judgement(format!("interval needs k1 < k2, got [{k1}, {k2}]")));
    }
    let (a, b) = (t.apply(k1)?, t.apply(k2)?);
    Ok((a, b - a))
}

/// The anchor m̂ on the transformed scale: g of the location prior's median.
pub fn location_anchor(t: Transform, prior: &LocationPrior) -> Result<f64> {
    t.apply(prior.median())
}

/// At least three quantile judgements about the population median φ, on the
/// original scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianJudgementSet {
    pub transform: Transform,
    pub quantiles: Vec<QuantileJudgement>,
}

impl MedianJudgementSet {
    pub fn new(transform: Transform, quantiles: Vec<QuantileJudgement>) -> Result<Self> {
        let s = Self { transform, quantiles };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.quantiles.len() < 3 {
            return Err(ElicitError::judgement(format!(
                "need at least three median quantiles, got {}",
                self.quantiles.len()
            )));
        }
        check_increasing(&self.quantiles)?;
        for q in &self.quantiles {
            if !self.transform.in_support(q.value) {
                return Err(ElicitError::judgement(format!(
                    "median quantile {} is outside the {} transform's support",
                    q.value, self.transform
                )));
            }
        }
        Ok(())
    }
}

/// A location prior for φ together with the transformed-scale anchor m̂ = g(median).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MedianPrior {
    pub prior: LocationPrior,
    pub anchor: f64,
}

/// Fits a prior for the population median on the original scale.
pub fn elicit_median_prior(mjs: &MedianJudgementSet, family: LocationFamily) -> Result<MedianPrior> {
    mjs.validate()?;
    let prior = fit_location_family(&mjs.quantiles, family)?;
    let anchor = location_anchor(mjs.transform, &prior)?;
    Ok(MedianPrior { prior, anchor })
}
