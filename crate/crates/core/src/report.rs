//! JSON payloads shared by the HTTP service and the CLI's `--json` mode, so
//! that both surfaces emit exactly the same shapes.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{ElicitError, Result};
use crate::feedback::{location_summary, LocationQuantile, LocationSummary};
use crate::fitting::{
    check_increasing, fit_location_family, fit_variance_prior, suggest_c, theta_sensitivity, theta_warnings,
    variance_quantiles, LocationFamily, LocationPrior, ProportionJudgement, QuantileJudgement,
    ThetaSensitivity, VariancePrior, VarianceQuantiles,
};
use crate::numerics::PrecisionFamilyTag;
use crate::session::{
    Fits, HistoryEntry, JudgementRecord, SessionContext, SessionRecord, SessionState,
};
use crate::transforms::{anchor_and_width, variance_interval_endpoints, Transform};

/// Grid size for the density shown with the mean-fit summary.
pub const SUMMARY_POINTS: usize = 201;

/// Error body: `{"code", "message", "details"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl From<&ElicitError> for ApiError {
    fn from(e: &ElicitError) -> Self {
        let details = match e {
            ElicitError::FitFailure { params, residual, .. } => {
                Some(json!({ "params": params, "residual": residual }))
            }
            ElicitError::Validation { invariant, .. } => Some(json!({ "invariant": invariant })),
            _ => None,
        };
        ApiError { code: e.code().to_string(), message: e.to_string(), details }
    }
}

impl From<ElicitError> for ApiError {
    fn from(e: ElicitError) -> Self {
        ApiError::from(&e)
    }
}

/// A fitted location prior with selected percentiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFitReport {
    pub prior: LocationPrior,
    pub quantiles: Vec<LocationQuantile>,
}

/// Fits a location prior to quantile judgements that lie strictly inside
/// `(lower, upper)`. The family defaults to normal.
pub fn fit_mean(
    judgements: &[QuantileJudgement],
    lower: f64,
    upper: f64,
    family: Option<LocationFamily>,
    levels: &[f64],
) -> Result<MeanFitReport> {
    if !(lower < upper) {
        return Err(ElicitError::judgement(format!("need L < U, got L = {lower}, U = {upper}")));
    }
    check_increasing(judgements)?;
    if let Some(j) = judgements.iter().find(|j| !(j.value > lower && j.value < upper)) {
        return Err(ElicitError::judgement(format!(
            "quantile value {} lies outside ({lower}, {upper})",
            j.value
        )));
    }
    let prior = fit_location_family(judgements, family.unwrap_or(LocationFamily::Normal))?;
    let mut quantiles = Vec::with_capacity(levels.len());
    for &alpha in levels {
        crate::numerics::check_probability(alpha)?;
        quantiles.push(LocationQuantile { alpha, value: prior.quantile(alpha) });
    }
    Ok(MeanFitReport { prior, quantiles })
}

/// Sensitivity of σ to each θ judgement and whether both lie in the robust band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Robustness {
    pub theta_lo: ThetaSensitivity,
    pub theta_hi: ThetaSensitivity,
    pub robust: bool,
    pub warnings: Vec<String>,
}

pub fn robustness(p: &ProportionJudgement) -> Result<Robustness> {
    let theta_lo = theta_sensitivity(p.theta_lo, p.width)?;
    let theta_hi = theta_sensitivity(p.theta_hi, p.width)?;
    Ok(Robustness {
        robust: theta_lo.in_robust_band && theta_hi.in_robust_band,
        theta_lo,
        theta_hi,
        warnings: theta_warnings(p),
    })
}

/// A fitted variance prior with the judgements it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionFitReport {
    pub transform: Transform,
    /// `[k1, k2]` on the original scale.
    pub interval: [f64; 2],
    pub proportion: ProportionJudgement,
    pub variance_quantiles: VarianceQuantiles,
    pub prior: VariancePrior,
    pub robustness: Robustness,
}

/// Fits a variance prior from the proportions `(θ_lo, θ_hi)` of the population
/// judged to lie in `[k1, k2]`.
pub fn fit_precision(
    transform: Transform,
    interval: (f64, f64),
    thetas: (f64, f64),
    family: PrecisionFamilyTag,
) -> Result<PrecisionFitReport> {
    let (m_hat, c) = anchor_and_width(interval.0, interval.1, transform)?;
    let proportion = ProportionJudgement::new(m_hat, c, thetas.0, thetas.1)?;
    precision_report(transform, proportion, family)
}

pub(crate) fn precision_report(
    transform: Transform,
    proportion: ProportionJudgement,
    family: PrecisionFamilyTag,
) -> Result<PrecisionFitReport> {
    let (k1, k2) = variance_interval_endpoints(proportion.anchor, proportion.width, transform)?;
    let vq = variance_quantiles(&proportion)?;
    let prior = fit_variance_prior(&vq, family)?;
    Ok(PrecisionFitReport {
        transform,
        interval: [k1, k2],
        robustness: robustness(&proportion)?,
        proportion,
        variance_quantiles: vq,
        prior,
    })
}

/// The session payload returned after every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub state: SessionState,
    pub transform: Transform,
    pub seed: u64,
    pub context: SessionContext,
    pub judgements: JudgementRecord,
    pub fits: Fits,
    /// `[k1, k2]` for the recorded proportion judgement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proportion_interval: Option<[f64; 2]>,
    /// Advisory width for the proportion question, `(g(U) − m̂)/3`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggested_c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_summary: Option<LocationSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robustness: Option<Robustness>,
    pub history: Vec<HistoryEntry>,
}

impl SessionView {
    pub fn of(s: &SessionRecord) -> Result<Self> {
        let mean_summary = match (&s.fits.location, s.judgements.lower, s.judgements.upper) {
            (Some(prior), Some(l), Some(u)) => Some(location_summary(
                prior,
                (l, u),
                &crate::feedback::LOCATION_SUMMARY_LEVELS,
                SUMMARY_POINTS,
            )?),
            _ => None,
        };
        let robustness = s.judgements.proportion.as_ref().map(robustness).transpose()?;
        Ok(SessionView {
            id: s.id.clone(),
            state: s.state,
            transform: s.transform,
            seed: s.seed,
            context: s.context.clone(),
            judgements: s.judgements.clone(),
            fits: s.fits.clone(),
            proportion_interval: s
                .judgements
                .proportion
                .as_ref()
                .map(|p| variance_interval_endpoints(p.anchor, p.width, s.transform).map(|(a, b)| [a, b]))
                .transpose()?,
            suggested_c: match (s.fits.anchor, s.judgements.upper) {
                (Some(m), Some(u)) => s.transform.apply(u).and_then(|gu| suggest_c(m, gu)).ok(),
                _ => None,
            },
            mean_summary,
            robustness,
            history: s.history.clone(),
        })
    }
}

/// Outcome of validating (and optionally replaying) a session document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub id: String,
    pub state: SessionState,
    pub events: usize,
    pub replayed: bool,
    pub verified: bool,
}
