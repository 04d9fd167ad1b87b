//! Turning quantile and proportion judgements into fitted priors.
//!
//! The location prior (for the population mean, or the median on the original
//! scale when a transform is in use) is fitted to two or more quantile
//! judgements. The variance prior is fitted to two σ² quantiles, which are in
//! turn derived from the expert's quantiles for θ, the proportion of the
//! population lying in `[m̂, m̂ + c]`.

mod location;
mod optim;
mod variance;

use serde::{Deserialize, Serialize};

use crate::error::{ElicitError, Result};
use crate::numerics::check_probability;

pub use location::{fit_location_family, fit_normal_from_two_quantiles, LocationFamily, LocationPrior};
pub use variance::{
    fit_variance_prior, sigma2_quantile_from_theta, suggest_c, theta_sensitivity,
    theta_warnings, variance_quantiles, ThetaSensitivity, VariancePrior, MAX_SHAPE,
    ROBUST_THETA_BAND,
};

/// "P(μ ≤ value) = alpha".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileJudgement {
    pub alpha: f64,
    pub value: f64,
}

impl QuantileJudgement {
    pub fn new(alpha: f64, value: f64) -> Result<Self> {
        let q = Self { alpha, value };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ElicitError::judgement(format!(
                "quantile level must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !self.value.is_finite() {
            return Err(ElicitError::judgement(format!(
                "quantile value must be finite, got {}",
                self.value
            )));
        }
        Ok(())
    }
}

/// Checks that judgements are individually valid and strictly increasing in
/// both level and value.
pub fn check_increasing(qs: &[QuantileJudgement]) -> Result<()> {
    for q in qs {
        q.validate()?;
    }
    for w in qs.windows(2) {
        if !(w[1].alpha > w[0].alpha) {
            return Err(ElicitError::judgement(format!(
                "quantile levels must be strictly increasing ({} then {})",
                w[0].alpha, w[1].alpha
            )));
        }
        if !(w[1].value > w[0].value) {
            return Err(ElicitError::judgement(format!(
                "quantile values must be strictly increasing with their levels ({} at {}, {} at {})",
                w[0].value, w[0].alpha, w[1].value, w[1].alpha
            )));
        }
    }
    Ok(())
}

fn default_lo_level() -> f64 {
    0.05
}

fn default_hi_level() -> f64 {
    0.95
}

/// The expert's quantiles for θ, the proportion of the population in
/// `[anchor, anchor + c]` given that the mean equals the anchor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionJudgement {
    /// m̂, the fitted location of the population (transformed scale).
    pub anchor: f64,
    /// Interval width c (transformed scale).
    #[serde(rename = "c")]
    pub width: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    /// Levels at which θ was judged; 5th and 95th percentiles unless stated.
    #[serde(default = "default_lo_level")]
    pub level_lo: f64,
    #[serde(default = "default_hi_level")]
    pub level_hi: f64,
}

impl ProportionJudgement {
    /// Judgement at the usual 5th/95th percentile levels.
    pub fn new(anchor: f64, width: f64, theta_lo: f64, theta_hi: f64) -> Result<Self> {
        let p = Self {
            anchor,
            width,
            theta_lo,
            theta_hi,
            level_lo: default_lo_level(),
            level_hi: default_hi_level(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.anchor.is_finite() {
            return Err(ElicitError::judgement("anchor must be finite"));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(ElicitError::domain(format!(
                "interval width c must be > 0, got {}",
                self.width
            )));
        }
        for t in [self.theta_lo, self.theta_hi] {
            if !(t > 0.0 && t < 0.5) {
                return Err(ElicitError::domain(format!(
                    "proportion must lie strictly between 0 and 0.5, got {t}"
                )));
            }
        }
        if !(self.theta_lo < self.theta_hi) {
            return Err(ElicitError::judgement(format!(
                "lower proportion quantile {} must be below upper {}",
                self.theta_lo, self.theta_hi
            )));
        }
        check_probability(self.level_lo)?;
        check_probability(self.level_hi)?;
        if !(self.level_lo < self.level_hi) {
            return Err(ElicitError::judgement("proportion quantile levels must increase"));
        }
        Ok(())
    }
}

/// Two quantiles of the expert's distribution for σ².
///
/// The field names follow the default 5th/95th levels; `level_lo`/`level_hi`
/// record the actual levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceQuantiles {
    pub sigma2_05: f64,
    pub sigma2_95: f64,
    #[serde(default = "default_lo_level")]
    pub level_lo: f64,
    #[serde(default = "default_hi_level")]
    pub level_hi: f64,
}

impl VarianceQuantiles {
    pub fn new(sigma2_05: f64, sigma2_95: f64) -> Result<Self> {
        let v = Self {
            sigma2_05,
            sigma2_95,
            level_lo: default_lo_level(),
            level_hi: default_hi_level(),
        };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2_05.is_finite() && self.sigma2_05 > 0.0 && self.sigma2_95.is_finite()) {
            return Err(ElicitError::domain("variance quantiles must be finite and positive"));
        }
        if !(self.sigma2_05 < self.sigma2_95) {
            return Err(ElicitError::judgement(format!(
                "variance quantiles must increase ({} then {})",
                self.sigma2_05, self.sigma2_95
            )));
        }
        check_probability(self.level_lo)?;
        check_probability(self.level_hi)?;
        if !(self.level_lo < self.level_hi) {
            return Err(ElicitError::judgement("variance quantile levels must increase"));
        }
        Ok(())
    }

    pub(crate) fn targets(&self) -> [(f64, f64); 2] {
        [(self.sigma2_05, self.level_lo), (self.sigma2_95, self.level_hi)]
    }
}

/// Parses a proportion typed by a person: `"0.33"` or `"33%"`.
///
/// Percentages must carry the `%` sign; a bare number is always a proportion.
pub fn parse_proportion(s: &str) -> Result<f64> {
    let t = s.trim();
    let (num, scale) = match t.strip_suffix('%') {
        Some(n) => (n.trim(), 100.0),
        None => (t, 1.0),
    };
    let v: f64 = num
        .parse()
        .map_err(|_| ElicitError::Parse(format!("not a proportion: '{s}'")))?;
    if !v.is_finite() {
        return Err(ElicitError::Parse(format!("not a proportion: '{s}'")));
    }
    Ok(v / scale)
}
