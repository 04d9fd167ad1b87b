use serde::{Deserialize, Serialize};

use super::optim::{minimize, SimplexOptions};
use super::{check_increasing, QuantileJudgement};
use crate::error::{ElicitError, Result};
use crate::numerics::special::std_normal_quantile;
use crate::numerics::{BetaParams, ContinuousDist, Distribution, LogNormalParams, NormalParams};

/// Exact-interpolation check for the closed-form shortcut.
const EXACT_TOL: f64 = 1e-12;

/// Family offered for the location (mean or median) prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum LocationFamily {
    Normal,
    #[serde(rename = "lognormal")]
    LogNormal,
    /// Beta rescaled to `[lower, upper]`.
    Beta { lower: f64, upper: f64 },
}

impl LocationFamily {
    /// Parses `normal`, `lognormal` or `beta`; the beta family takes its
    /// support from the plausible bounds.
    pub fn parse(tag: &str, lower: f64, upper: f64) -> Result<Self> {
        match tag {
            "normal" => Ok(Self::Normal),
            "lognormal" | "log-normal" => Ok(Self::LogNormal),
            "beta" | "scaled-beta" => Ok(Self::Beta { lower, upper }),
            other => Err(ElicitError::domain(format!("unknown location family '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Normal => "normal",
            Self::LogNormal => "lognormal",
            Self::Beta { .. } => "beta",
        }
    }

    fn support(&self) -> (f64, f64) {
        match *self {
            Self::Normal => (f64::NEG_INFINITY, f64::INFINITY),
            Self::LogNormal => (0.0, f64::INFINITY),
            Self::Beta { lower, upper } => (lower, upper),
        }
    }
}

/// Fitted prior for the population mean (or median).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationPrior {
    pub distribution: Distribution,
    pub fitted_from: Vec<QuantileJudgement>,
    /// Σ (F(valueᵢ) − alphaᵢ)² at the fitted parameters.
    pub residual: f64,
}

impl LocationPrior {
    pub fn family(&self) -> &'static str {
        match self.distribution {
            Distribution::Normal(_) => "normal",
            Distribution::LogNormal(_) => "lognormal",
            Distribution::Beta(_) => "beta",
            Distribution::InverseGamma(_) => "inverse-gamma",
            Distribution::Gamma(_) => "gamma",
        }
    }

    pub fn median(&self) -> f64 {
        self.distribution.quantile(0.5)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.distribution.quantile(p)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.distribution.cdf(x)
    }

    pub fn as_normal(&self) -> Option<NormalParams> {
        match self.distribution {
            Distribution::Normal(p) => Some(p),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.distribution.validate()?;
        match self.distribution {
            Distribution::Normal(_) | Distribution::LogNormal(_) | Distribution::Beta(_) => Ok(()),
            _ => Err(ElicitError::domain(format!(
                "{} is not a location family",
                self.family()
            ))),
        }
    }
}

/// Normal prior passing exactly through two quantile judgements.
pub fn fit_normal_from_two_quantiles(
    q1: QuantileJudgement,
    q2: QuantileJudgement,
) -> Result<NormalParams> {
    check_increasing(&[q1, q2])?;
    let (mean, sd) = two_point(q1.alpha, q1.value, q2.alpha, q2.value);
    NormalParams::new(mean, sd * sd)
}

// m̂ and √v̂ from (α₁, x₁), (α₂, x₂).
fn two_point(a1: f64, x1: f64, a2: f64, x2: f64) -> (f64, f64) {
    let (z1, z2) = (std_normal_quantile(a1), std_normal_quantile(a2));
    let mean = (x1 * z2 - x2 * z1) / (z2 - z1);
    let sd = (x2 - x1) / (z2 - z1);
    (mean, sd)
}

fn sum_sq(d: &Distribution, qs: &[QuantileJudgement]) -> f64 {
    qs.iter().map(|q| (d.cdf(q.value) - q.alpha).powi(2)).sum()
}

fn exact(d: &Distribution, qs: &[QuantileJudgement]) -> bool {
    qs.iter().all(|q| (d.cdf(q.value) - q.alpha).abs() <= EXACT_TOL)
}

/// Least-squares fit of a location family to quantile judgements, minimising
/// Σ (F(valueᵢ) − alphaᵢ)².
///
/// Two judgements give an exact fit; three or more are usual. For the normal
/// and lognormal families the closed form through the outermost pair is used
/// whenever it already reproduces every judgement.
pub fn fit_location_family(
    quantiles: &[QuantileJudgement],
    family: LocationFamily,
) -> Result<LocationPrior> {
    if quantiles.len() < 2 {
        return Err(ElicitError::judgement(format!(
            "need at least two quantile judgements, got {}",
            quantiles.len()
        )));
    }
    check_increasing(quantiles)?;
    let (lo, hi) = family.support();
    if let LocationFamily::Beta { lower, upper } = family {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(ElicitError::domain("beta support needs finite lower < upper"));
        }
    }
    for q in quantiles {
        if !(q.value > lo && q.value < hi) {
            return Err(ElicitError::judgement(format!(
                "value {} lies outside the {} support ({lo}, {hi})",
                q.value,
                family.name()
            )));
        }
    }

    let first = quantiles[0];
    let last = quantiles[quantiles.len() - 1];
    let (dist, x0, step): (Distribution, [f64; 2], [f64; 2]) = match family {
        LocationFamily::Normal => {
            let (m, s) = two_point(first.alpha, first.value, last.alpha, last.value);
            let d = Distribution::Normal(NormalParams { mean: m, variance: s * s });
            (d, [m, s.ln()], [0.1 * s, 0.1])
        }
        LocationFamily::LogNormal => {
            let (m, s) = two_point(first.alpha, first.value.ln(), last.alpha, last.value.ln());
            let d = Distribution::LogNormal(LogNormalParams { meanlog: m, sdlog: s });
            (d, [m, s.ln()], [0.1 * s, 0.1])
        }
        LocationFamily::Beta { lower, upper } => {
            let (a, b) = beta_start(quantiles, lower, upper);
            let d = Distribution::Beta(BetaParams { alpha: a, beta: b, lower, upper });
            (d, [a.ln(), b.ln()], [0.3, 0.3])
        }
    };
    let closed_form = !matches!(family, LocationFamily::Beta { .. });
    if closed_form && exact(&dist, quantiles) {
        return Ok(LocationPrior {
            residual: sum_sq(&dist, quantiles),
            distribution: dist,
            fitted_from: quantiles.to_vec(),
        });
    }

    let build = move |p: &[f64]| -> Distribution {
        match family {
            LocationFamily::Normal => Distribution::Normal(NormalParams {
                mean: p[0],
                variance: (2.0 * p[1]).exp(),
            }),
            LocationFamily::LogNormal => Distribution::LogNormal(LogNormalParams {
                meanlog: p[0],
                sdlog: p[1].exp(),
            }),
            LocationFamily::Beta { lower, upper } => Distribution::Beta(BetaParams {
                alpha: p[0].exp(),
                beta: p[1].exp(),
                lower,
                upper,
            }),
        }
    };
    let objective = |p: &[f64]| {
        let d = build(p);
        if d.validate().is_err() {
            return f64::INFINITY;
        }
        sum_sq(&d, quantiles)
    };
    let opts = SimplexOptions {
        x_tol: 1e-10,
        ..SimplexOptions::default()
    };
    let r = minimize(objective, &x0, &step, opts);
    let best = build(&r.x);
    if !r.converged || best.validate().is_err() {
        return Err(ElicitError::FitFailure {
            message: format!(
                "{} fit did not converge in {} iterations",
                family.name(),
                r.iterations
            ),
            params: r.x,
            residual: r.fx,
        });
    }
    Ok(LocationPrior {
        distribution: best,
        fitted_from: quantiles.to_vec(),
        residual: r.fx,
    })
}

// Moment-style start: mean from the judged median, spread from the outer pair.
fn beta_start(qs: &[QuantileJudgement], lower: f64, upper: f64) -> (f64, f64) {
    let unit = |x: f64| (x - lower) / (upper - lower);
    let first = qs[0];
    let last = qs[qs.len() - 1];
    let (m, s) = two_point(first.alpha, unit(first.value), last.alpha, unit(last.value));
    let m = m.clamp(0.01, 0.99);
    let var = (s * s).min(0.9 * m * (1.0 - m));
    let k = m * (1.0 - m) / var - 1.0;
    ((m * k).max(0.05), ((1.0 - m) * k).max(0.05))
}
