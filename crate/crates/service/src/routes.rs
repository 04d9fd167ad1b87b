use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use elicit_core::feedback::{FeedbackBundle, FeedbackConfig, LocationSummary};
use elicit_core::fitting::{parse_proportion, LocationFamily, QuantileJudgement};
use elicit_core::numerics::PrecisionFamilyTag;
use elicit_core::report::{self, MeanFitReport, PrecisionFitReport, SessionView};
use elicit_core::session::{
    new_seed, new_session_id, ProportionInput, RevisionInput, RevisionTarget, SessionContext,
    SessionRecord, SessionState,
};
use elicit_core::transforms::Transform;
use elicit_core::ElicitError;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ApiResult;
use crate::{blocking, AppState};

type AppStateRef = State<Arc<AppState>>;

pub(crate) fn routes() -> Router<Arc<AppState>> {
    Router::new()
        .route("/health", get(|| async { Json(serde_json::json!({ "status": "ok" })) }))
        .route("/sessions", post(create).get(list))
        .route("/sessions/import", post(import))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/bounds", post(bounds))
        .route("/sessions/{id}/mean-quantiles", post(mean_quantiles))
        .route("/sessions/{id}/proportion", post(proportion))
        .route("/sessions/{id}/revise", post(revise))
        .route("/sessions/{id}/feedback", post(feedback))
        .route("/sessions/{id}/conclude", post(conclude))
        .route("/sessions/{id}/export", get(export))
        .route("/fit/mean", post(fit_mean))
        .route("/fit/precision", post(fit_precision))
}

// Bodies are parsed by hand so malformed JSON reports `parse-error` in the
// usual error shape. An empty body reads as `{}`.
fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ElicitError> {
    let text = if body.iter().all(u8::is_ascii_whitespace) { &b"{}"[..] } else { &body[..] };
    serde_json::from_slice(text).map_err(|e| ElicitError::Parse(format!("request body: {e}")))
}

fn view(record: &SessionRecord) -> ApiResult<Json<SessionView>> {
    Ok(Json(SessionView::of(record)?))
}

/// A proportion as a number or as text such as `"33%"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Proportion {
    Number(f64),
    Text(String),
}

impl Proportion {
    fn value(&self) -> Result<f64, ElicitError> {
        match self {
            Proportion::Number(v) => Ok(*v),
            Proportion::Text(s) => parse_proportion(s),
        }
    }
}

fn precision_family(tag: Option<&str>) -> Result<PrecisionFamilyTag, ElicitError> {
    tag.map_or(Ok(PrecisionFamilyTag::default()), str::parse)
}

#[derive(Deserialize)]
struct CreateBody {
    #[serde(default)]
    id: Option<String>,
    #[serde(default)]
    context: SessionContext,
    #[serde(default)]
    transform: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
}

async fn create(State(st): AppStateRef, body: Bytes) -> ApiResult<Response> {
    let b: CreateBody = parse(&body)?;
    let transform = match b.transform.as_deref() {
        Some(t) => t.parse::<Transform>()?,
        None => Transform::Identity,
    };
    let id = match b.id {
        Some(id) if !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') => id,
        Some(id) => {
            return Err(ElicitError::InvalidConfig(format!("session id '{id}' must match [A-Za-z0-9_-]+")).into())
        }
        None => new_session_id(),
    };
    let record = SessionRecord::create(id, b.context, transform, b.seed.unwrap_or_else(new_seed), st.now());
    let record = st.insert(record).await?;
    tracing::info!(id = %record.id, %transform, "session created");
    Ok((StatusCode::CREATED, view(&record)?).into_response())
}

async fn list(State(st): AppStateRef) -> ApiResult<Json<Vec<String>>> {
    let st = Arc::clone(&st);
    Ok(Json(blocking(move || st.store().list()).await?))
}

async fn show(State(st): AppStateRef, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let st = Arc::clone(&st);
    let record = blocking(move || st.store().load(&id)).await?;
    view(&record)
}

#[derive(Deserialize)]
struct BoundsBody {
    #[serde(rename = "L", alias = "lower")]
    lower: f64,
    #[serde(rename = "U", alias = "upper")]
    upper: f64,
}

async fn bounds(State(st): AppStateRef, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<SessionView>> {
    let b: BoundsBody = parse(&body)?;
    let record = st
        .mutate(id, move |s, at| {
            s.record_bounds(b.lower, b.upper, at)?;
            Ok(s.clone())
        })
        .await?;
    view(&record)
}

#[derive(Deserialize)]
struct MeanBody {
    quantiles: Vec<QuantileJudgement>,
    #[serde(default)]
    family: Option<String>,
}

fn location_family(s: &SessionRecord, tag: Option<&str>) -> Result<Option<LocationFamily>, ElicitError> {
    let Some(tag) = tag else { return Ok(None) };
    let (l, u) = (s.judgements.lower.unwrap_or(f64::NAN), s.judgements.upper.unwrap_or(f64::NAN));
    LocationFamily::parse(tag, l, u).map(Some)
}

async fn mean_quantiles(
    State(st): AppStateRef,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let b: MeanBody = parse(&body)?;
    let record = st
        .mutate(id, move |s, at| {
            let family = location_family(s, b.family.as_deref())?;
            s.record_mean_quantiles_and_fit(b.quantiles, family, at)?;
            Ok(s.clone())
        })
        .await?;
    view(&record)
}

#[derive(Deserialize)]
struct ProportionBody {
    c: f64,
    theta_lo: Proportion,
    theta_hi: Proportion,
    #[serde(default)]
    family: Option<String>,
}

impl ProportionBody {
    fn input(&self) -> Result<ProportionInput, ElicitError> {
        let mut input = ProportionInput::new(self.c, self.theta_lo.value()?, self.theta_hi.value()?);
        input.family = precision_family(self.family.as_deref())?;
        Ok(input)
    }
}

async fn proportion(
    State(st): AppStateRef,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<SessionView>> {
    let input = parse::<ProportionBody>(&body)?.input()?;
    let record = st
        .mutate(id, move |s, at| {
            s.record_proportion_and_fit(input, at)?;
            Ok(s.clone())
        })
        .await?;
    view(&record)
}

/// `{"target": "mean" | "proportion"}` plus, optionally, the new judgements.
#[derive(Deserialize)]
struct ReviseBody {
    target: RevisionTarget,
    #[serde(default)]
    quantiles: Option<Vec<QuantileJudgement>>,
    #[serde(default)]
    family: Option<String>,
    #[serde(default)]
    c: Option<f64>,
    #[serde(default)]
    theta_lo: Option<Proportion>,
    #[serde(default)]
    theta_hi: Option<Proportion>,
}

async fn revise(State(st): AppStateRef, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<SessionView>> {
    let b: ReviseBody = parse(&body)?;
    let record = st
        .mutate(id, move |s, at| {
            let input = match b.target {
                RevisionTarget::Mean => match b.quantiles {
                    Some(quantiles) => Some(RevisionInput::Mean {
                        quantiles,
                        family: location_family(s, b.family.as_deref())?,
                    }),
                    None => None,
                },
                RevisionTarget::Proportion => match (b.c, b.theta_lo, b.theta_hi) {
                    (Some(c), Some(theta_lo), Some(theta_hi)) => Some(RevisionInput::Proportion(
                        ProportionBody { c, theta_lo, theta_hi, family: b.family }.input()?,
                    )),
                    (None, None, None) => None,
                    _ => {
                        return Err(ElicitError::InvalidJudgement(
                            "a proportion revision needs c, theta_lo and theta_hi together".into(),
                        ))
                    }
                },
            };
            s.revise(b.target, input, at)?;
            Ok(s.clone())
        })
        .await?;
    view(&record)
}

/// Per-request overrides of the feedback configuration.
#[derive(Debug, Default, Deserialize)]
struct FeedbackOverrides {
    #[serde(rename = "K")]
    k: Option<usize>,
    #[serde(rename = "J")]
    j: Option<usize>,
    seed: Option<u64>,
    band_level: Option<f64>,
    quantile_interval_level: Option<f64>,
    quantiles: Option<Vec<f64>>,
}

/// Full Monte Carlo feedback once the variance is fitted; before that, the
/// location prior summaries.
#[derive(Serialize)]
#[serde(untagged)]
enum FeedbackPayload {
    Full(FeedbackBundle),
    Mean(LocationSummary),
}

async fn feedback(State(st): AppStateRef, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let o: FeedbackOverrides = parse(&body)?;
    let (default_k, default_j, max_k) = (st.config.default_k, st.config.default_j, st.config.max_k);
    let k = o.k.unwrap_or(default_k);
    if k > max_k {
        return Err(ElicitError::InvalidConfig(format!(
            "K = {k} exceeds the API limit of {max_k}; use the CLI for larger runs"
        ))
        .into());
    }
    let payload = st
        .mutate(id, move |s, at| {
            let base = s.feedback_config();
            let cfg = FeedbackConfig {
                k,
                j: o.j.unwrap_or(default_j),
                seed: o.seed.unwrap_or(base.seed),
                band_level: o.band_level.unwrap_or(base.band_level),
                quantile_interval_level: o.quantile_interval_level.unwrap_or(base.quantile_interval_level),
                quantiles: o.quantiles.unwrap_or(base.quantiles),
            };
            cfg.validate()?;
            if s.state >= SessionState::VarianceFitted {
                s.show_feedback(&cfg, at).map(FeedbackPayload::Full)
            } else {
                s.mean_feedback(cfg.j).map(FeedbackPayload::Mean)
            }
        })
        .await?;
    Ok(Json(payload).into_response())
}

#[derive(Deserialize, Default)]
struct ConcludeBody {
    #[serde(default)]
    note: Option<String>,
}

async fn conclude(State(st): AppStateRef, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<SessionView>> {
    let b: ConcludeBody = parse(&body)?;
    let record = st
        .mutate(id, move |s, at| {
            s.conclude(b.note, at)?;
            Ok(s.clone())
        })
        .await?;
    view(&record)
}

async fn export(State(st): AppStateRef, Path(id): Path<String>) -> ApiResult<Response> {
    let st = Arc::clone(&st);
    let doc = blocking(move || st.store().load(&id)?.export()).await?;
    Ok(([(header::CONTENT_TYPE, "application/json")], doc).into_response())
}

/// Imports a session document under a fresh id.
async fn import(State(st): AppStateRef, body: Bytes) -> ApiResult<Response> {
    let doc = std::str::from_utf8(&body)
        .map_err(|e| ElicitError::Parse(format!("document is not UTF-8: {e}")))?
        .to_owned();
    let mut record = blocking(move || SessionRecord::import(&doc)).await?;
    record.id = new_session_id();
    let record = st.insert(record).await?;
    tracing::info!(id = %record.id, "session imported");
    Ok((StatusCode::CREATED, view(&record)?).into_response())
}

#[derive(Deserialize)]
struct FitMeanBody {
    probs: Vec<f64>,
    vals: Vec<f64>,
    lower: f64,
    upper: f64,
    #[serde(default)]
    family: Option<String>,
    #[serde(default)]
    levels: Vec<f64>,
}

async fn fit_mean(body: Bytes) -> ApiResult<Json<MeanFitReport>> {
    let b: FitMeanBody = parse(&body)?;
    if b.probs.len() != b.vals.len() {
        return Err(ElicitError::InvalidJudgement(format!(
            "probs has {} entries but vals has {}",
            b.probs.len(),
            b.vals.len()
        ))
        .into());
    }
    let judgements = b
        .probs
        .iter()
        .zip(&b.vals)
        .map(|(&p, &v)| QuantileJudgement::new(p, v))
        .collect::<Result<Vec<_>, _>>()?;
    let family = b.family.as_deref().map(|t| LocationFamily::parse(t, b.lower, b.upper)).transpose()?;
    let r = blocking(move || report::fit_mean(&judgements, b.lower, b.upper, family, &b.levels)).await?;
    Ok(Json(r))
}

#[derive(Deserialize)]
struct FitPrecisionBody {
    interval: [f64; 2],
    propvals: [Proportion; 2],
    #[serde(default)]
    family: Option<String>,
    #[serde(default)]
    transform: Option<String>,
}

async fn fit_precision(body: Bytes) -> ApiResult<Json<PrecisionFitReport>> {
    let b: FitPrecisionBody = parse(&body)?;
    let transform = b.transform.as_deref().map(str::parse::<Transform>).transpose()?.unwrap_or_default();
    let thetas = (b.propvals[0].value()?, b.propvals[1].value()?);
    let family = precision_family(b.family.as_deref())?;
    let interval = (b.interval[0], b.interval[1]);
    let r = blocking(move || report::fit_precision(transform, interval, thetas, family)).await?;
    Ok(Json(r))
}
