//! The elicitation workflow as an event-sourced record.
//!
//! Every command validates its input, computes any fit, and appends exactly one
//! event to the history. The current judgements, fits and state are the fold of
//! that history ([`SessionRecord::replay`]), so a saved session can always be
//! audited back to the expert's statements.
//!
//! ```text
//! Created → BoundsSet → (MeanElicited) → MeanFitted → (ProportionElicited)
//!         → VarianceFitted → FeedbackShown → Concluded
//! ```
//!
//! Revision moves any state back to `MeanElicited` or `ProportionElicited`
//! (or, when new judgements are supplied, straight to the refitted state).

mod store;

use serde::{Deserialize, Serialize};
use time::OffsetDateTime;

use crate::error::{ElicitError, Result};
use crate::feedback::{
    check_bounds, feedback_bundle, location_summary, FeedbackBundle, FeedbackConfig,
    LocationSummary, PopulationModel, LOCATION_SUMMARY_LEVELS,
};
use crate::fitting::{
    check_increasing, fit_location_family, fit_variance_prior, theta_warnings, variance_quantiles,
    LocationFamily, LocationPrior, ProportionJudgement, QuantileJudgement, VariancePrior,
    VarianceQuantiles,
};
use crate::numerics::PrecisionFamilyTag;
use crate::transforms::{location_anchor, Transform};

pub use store::FileStore;

/// Version of the session document layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SessionState {
    Created,
    BoundsSet,
    MeanElicited,
    MeanFitted,
    ProportionElicited,
    VarianceFitted,
    FeedbackShown,
    Concluded,
}

/// Free-text details recorded at the start of a session.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionContext {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purpose: Option<String>,
    /// Definition of the uncertain quantity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expert: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facilitator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub training_notes: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// Everything the expert has stated so far.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct JudgementRecord {
    #[serde(rename = "L")]
    pub lower: Option<f64>,
    #[serde(rename = "U")]
    pub upper: Option<f64>,
    #[serde(default)]
    pub mean_quantiles: Vec<QuantileJudgement>,
    #[serde(default)]
    pub location_family: Option<LocationFamily>,
    #[serde(default)]
    pub proportion: Option<ProportionJudgement>,
    #[serde(default)]
    pub precision_family: Option<PrecisionFamilyTag>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Fits {
    pub location: Option<LocationPrior>,
    /// m̂ on the transformed scale.
    pub anchor: Option<f64>,
    pub variance: Option<VariancePrior>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RevisionTarget {
    Mean,
    Proportion,
}

/// One step of the workflow. Fit events carry their results so that replay
/// needs no numerical work.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Event {
    Created {
        context: SessionContext,
        transform: Transform,
        seed: u64,
    },
    BoundsRecorded {
        #[serde(rename = "L")]
        lower: f64,
        #[serde(rename = "U")]
        upper: f64,
    },
    MeanFitted {
        quantiles: Vec<QuantileJudgement>,
        family: LocationFamily,
        prior: LocationPrior,
        anchor: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        revision: bool,
    },
    VarianceFitted {
        proportion: ProportionJudgement,
        family: PrecisionFamilyTag,
        variance_quantiles: VarianceQuantiles,
        prior: VariancePrior,
        warnings: Vec<String>,
        #[serde(default, skip_serializing_if = "is_false")]
        revision: bool,
    },
    FeedbackShown {
        config: FeedbackConfig,
    },
    RevisionOpened {
        target: RevisionTarget,
    },
    Concluded {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub seq: u64,
    #[serde(with = "time::serde::rfc3339")]
    pub timestamp: OffsetDateTime,
    pub event: Event,
}

/// Answer to the proportion question, before the anchor is attached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionInput {
    pub c: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    #[serde(default = "lo_level")]
    pub level_lo: f64,
    #[serde(default = "hi_level")]
    pub level_hi: f64,
    #[serde(default)]
    pub family: PrecisionFamilyTag,
}

fn lo_level() -> f64 {
    0.05
}
fn hi_level() -> f64 {
    0.95
}

impl ProportionInput {
    pub fn new(c: f64, theta_lo: f64, theta_hi: f64) -> Self {
        Self {
            c,
            theta_lo,
            theta_hi,
            level_lo: lo_level(),
            level_hi: hi_level(),
            family: PrecisionFamilyTag::InverseGamma,
        }
    }
}

/// New judgements supplied with a revision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "lowercase")]
pub enum RevisionInput {
    Mean {
        quantiles: Vec<QuantileJudgement>,
        #[serde(default)]
        family: Option<LocationFamily>,
    },
    Proportion(ProportionInput),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub schema_version: u32,
    pub id: String,
    pub context: SessionContext,
    pub transform: Transform,
    /// Seed for all Monte Carlo feedback in this session.
    pub seed: u64,
    pub judgements: JudgementRecord,
    pub fits: Fits,
    pub state: SessionState,
    pub history: Vec<HistoryEntry>,
}

pub fn new_session_id() -> String {
    uuid::Uuid::new_v4().to_string()
}

/// A fresh seed for a new session's Monte Carlo feedback.
pub fn new_seed() -> u64 {
    uuid::Uuid::new_v4().as_u64_pair().0
}

fn state_error(msg: impl Into<String>) -> ElicitError {
    ElicitError::State(msg.into())
}

impl SessionRecord {
    fn blank(id: String) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            id,
            context: SessionContext::default(),
            transform: Transform::Identity,
            seed: 0,
            judgements: JudgementRecord::default(),
            fits: Fits::default(),
            state: SessionState::Created,
            history: Vec::new(),
        }
    }

    pub fn create(
        id: impl Into<String>,
        context: SessionContext,
        transform: Transform,
        seed: u64,
        at: OffsetDateTime,
    ) -> Self {
        let mut s = Self::blank(id.into());
        s.commit(Event::Created { context, transform, seed }, at)
            .expect("creation cannot fail");
        s
    }

    /// Applies an event to a copy and appends it to the history on success,
    /// so a failed command leaves the record untouched.
    fn commit(&mut self, event: Event, at: OffsetDateTime) -> Result<()> {
        let mut next = self.clone();
        next.apply(&event)?;
        next.history.push(HistoryEntry {
            seq: self.history.len() as u64,
            timestamp: at,
            event,
        });
        *self = next;
        Ok(())
    }

    fn apply(&mut self, event: &Event) -> Result<()> {
        use SessionState::*;
        match event {
            Event::Created { context, transform, seed } => {
                if !self.history.is_empty() {
                    return Err(state_error("session already created"));
                }
                self.context = context.clone();
                self.transform = *transform;
                self.seed = *seed;
                self.state = Created;
            }
            Event::BoundsRecorded { lower, upper } => {
                if self.state != Created {
                    return Err(state_error(format!(
                        "bounds can only be recorded in state Created (now {:?})",
                        self.state
                    )));
                }
                self.judgements.lower = Some(*lower);
                self.judgements.upper = Some(*upper);
                self.state = BoundsSet;
            }
            Event::MeanFitted { quantiles, family, prior, anchor, .. } => {
                if self.state < BoundsSet || self.state == Concluded {
                    return Err(state_error(format!(
                        "mean quantiles need bounds first and an open session (now {:?})",
                        self.state
                    )));
                }
                let unchanged = self.fits.anchor == Some(*anchor) && self.fits.variance.is_some();
                self.judgements.mean_quantiles = quantiles.clone();
                self.judgements.location_family = Some(*family);
                self.fits.location = Some(prior.clone());
                self.fits.anchor = Some(*anchor);
                if !unchanged {
                    // the proportion question was asked about the old anchor
                    self.judgements.proportion = None;
                    self.judgements.precision_family = None;
                    self.fits.variance = None;
                    self.fits.warnings.clear();
                    self.state = MeanFitted;
                }
            }
            Event::VarianceFitted { proportion, family, prior, warnings, .. } => {
                if self.state < MeanFitted || self.state == Concluded {
                    return Err(state_error(format!(
                        "the proportion question needs a fitted mean prior (now {:?})",
                        self.state
                    )));
                }
                if self.fits.anchor != Some(proportion.anchor) {
                    return Err(state_error("proportion anchor differs from the fitted location"));
                }
                self.judgements.proportion = Some(*proportion);
                self.judgements.precision_family = Some(*family);
                self.fits.variance = Some(prior.clone());
                self.fits.warnings = warnings.clone();
                self.state = VarianceFitted;
            }
            Event::FeedbackShown { .. } => {
                if self.state != VarianceFitted {
                    return Err(state_error(format!(
                        "full feedback needs a fitted variance prior (now {:?})",
                        self.state
                    )));
                }
                self.state = FeedbackShown;
            }
            Event::RevisionOpened { target } => {
                match target {
                    RevisionTarget::Mean => {
                        if self.state < MeanElicited {
                            return Err(state_error("the mean has not been elicited yet"));
                        }
                        self.fits = Fits::default();
                        self.judgements.proportion = None;
                        self.judgements.precision_family = None;
                        self.state = MeanElicited;
                    }
                    RevisionTarget::Proportion => {
                        if self.state < ProportionElicited {
                            return Err(state_error("the proportion has not been elicited yet"));
                        }
                        self.fits.variance = None;
                        self.fits.warnings.clear();
                        self.state = ProportionElicited;
                    }
                }
            }
            Event::Concluded { .. } => {
                if self.state != FeedbackShown {
                    return Err(state_error(format!(
                        "the expert can only accept the fit after seeing feedback (now {:?})",
                        self.state
                    )));
                }
                self.state = Concluded;
            }
        }
        Ok(())
    }

    fn bounds(&self) -> Result<(f64, f64)> {
        match (self.judgements.lower, self.judgements.upper) {
            (Some(l), Some(u)) => Ok((l, u)),
            _ => Err(state_error("plausible bounds have not been recorded")),
        }
    }

    fn open(&self) -> Result<()> {
        if self.state == SessionState::Concluded {
            Err(state_error("session is concluded; open a revision first"))
        } else {
            Ok(())
        }
    }

    /// Plausible bounds L < U for a single population member.
    pub fn record_bounds(&mut self, lower: f64, upper: f64, at: OffsetDateTime) -> Result<()> {
        if self.state != SessionState::Created {
            return Err(state_error(format!(
                "bounds can only be recorded in state Created (now {:?})",
                self.state
            )));
        }
        check_bounds(self.transform, lower, upper)?;
        self.commit(Event::BoundsRecorded { lower, upper }, at)
    }

    fn mean_event(
        &self,
        quantiles: Vec<QuantileJudgement>,
        family: Option<LocationFamily>,
        revision: bool,
    ) -> Result<Event> {
        let (lower, upper) = self.bounds()?;
        check_increasing(&quantiles)?;
        for q in &quantiles {
            if !(q.value > lower && q.value < upper) {
                return Err(ElicitError::judgement(format!(
                    "quantile value {} lies outside the plausible range ({lower}, {upper})",
                    q.value
                )));
            }
        }
        let family = match family {
            Some(LocationFamily::Beta { .. }) => LocationFamily::Beta { lower, upper },
            Some(f) => f,
            None => self
                .transform
                .natural_family()
                .unwrap_or(LocationFamily::Beta { lower, upper }),
        };
        let prior = fit_location_family(&quantiles, family)?;
        let anchor = location_anchor(self.transform, &prior)?;
        Ok(Event::MeanFitted { quantiles, family, prior, anchor, revision })
    }

    /// Quantile judgements about the population mean (median φ under a
    /// transform), and the location prior fitted to them.
    pub fn record_mean_quantiles_and_fit(
        &mut self,
        quantiles: Vec<QuantileJudgement>,
        family: Option<LocationFamily>,
        at: OffsetDateTime,
    ) -> Result<&LocationPrior> {
        self.open()?;
        if self.state < SessionState::BoundsSet {
            return Err(state_error("record the plausible bounds first"));
        }
        let revision = self.fits.location.is_some();
        let event = self.mean_event(quantiles, family, revision)?;
        self.commit(event, at)?;
        Ok(self.fits.location.as_ref().expect("just fitted"))
    }

    fn variance_event(&self, input: ProportionInput, revision: bool) -> Result<Event> {
        let anchor = self
            .fits
            .anchor
            .ok_or_else(|| state_error("fit the mean prior before asking the proportion question"))?;
        let proportion = ProportionJudgement {
            anchor,
            width: input.c,
            theta_lo: input.theta_lo,
            theta_hi: input.theta_hi,
            level_lo: input.level_lo,
            level_hi: input.level_hi,
        };
        let vq = variance_quantiles(&proportion)?;
        let prior = fit_variance_prior(&vq, input.family)?;
        Ok(Event::VarianceFitted {
            proportion,
            family: input.family,
            variance_quantiles: vq,
            prior,
            warnings: theta_warnings(&proportion),
            revision,
        })
    }

    /// The expert's quantiles for the proportion in `[m̂, m̂ + c]`, and the
    /// variance prior fitted to them. The anchor is the fitted location.
    pub fn record_proportion_and_fit(
        &mut self,
        input: ProportionInput,
        at: OffsetDateTime,
    ) -> Result<&VariancePrior> {
        self.open()?;
        if self.state < SessionState::MeanFitted {
            return Err(state_error(format!(
                "the proportion question needs a fitted mean prior (now {:?})",
                self.state
            )));
        }
        let revision = self.fits.variance.is_some() || self.judgements.proportion.is_some();
        let event = self.variance_event(input, revision)?;
        self.commit(event, at)?;
        Ok(self.fits.variance.as_ref().expect("just fitted"))
    }

    /// Reopens an earlier step. With new judgements the step is refitted at
    /// once; without, the session waits in `MeanElicited`/`ProportionElicited`
    /// for them. Either way exactly one history entry is added.
    pub fn revise(
        &mut self,
        target: RevisionTarget,
        input: Option<RevisionInput>,
        at: OffsetDateTime,
    ) -> Result<()> {
        use SessionState::*;
        let reached = match target {
            RevisionTarget::Mean => self.state >= MeanElicited,
            RevisionTarget::Proportion => self.state >= ProportionElicited,
        };
        if !reached {
            return Err(state_error(format!(
                "cannot revise the {target:?} step before it has been reached (now {:?})",
                self.state
            )));
        }
        let event = match (target, input) {
            (_, None) => Event::RevisionOpened { target },
            (RevisionTarget::Mean, Some(RevisionInput::Mean { quantiles, family })) => {
                self.mean_event(quantiles, family, true)?
            }
            (RevisionTarget::Proportion, Some(RevisionInput::Proportion(p))) => {
                if self.fits.anchor.is_none() {
                    return Err(state_error("no fitted mean prior to anchor the proportion"));
                }
                self.variance_event(p, true)?
            }
            (t, Some(_)) => {
                return Err(ElicitError::judgement(format!(
                    "revision target {t:?} does not match the supplied judgements"
                )))
            }
        };
        // a concluded session is reopened by the revision itself
        let mut scratch = self.clone();
        if scratch.state == Concluded {
            scratch.state = FeedbackShown;
        }
        scratch.apply(&event)?;
        scratch.history.push(HistoryEntry {
            seq: self.history.len() as u64,
            timestamp: at,
            event,
        });
        *self = scratch;
        Ok(())
    }

    /// The population model implied by the current fits.
    pub fn model(&self) -> Result<PopulationModel> {
        let (lower, upper) = self.bounds()?;
        let location = self
            .fits
            .location
            .clone()
            .ok_or_else(|| state_error("no fitted location prior"))?;
        let variance = self
            .fits
            .variance
            .clone()
            .ok_or_else(|| state_error("no fitted variance prior"))?;
        PopulationModel::new(self.transform, location, variance, lower, upper)
    }

    /// Percentiles and density of the location prior, available once the
    /// mean has been fitted.
    pub fn mean_feedback(&self, j: usize) -> Result<LocationSummary> {
        let prior = self
            .fits
            .location
            .as_ref()
            .ok_or_else(|| state_error("no fitted location prior"))?;
        location_summary(prior, self.bounds()?, &LOCATION_SUMMARY_LEVELS, j)
    }

    /// Full Monte Carlo feedback. Moves `VarianceFitted` to `FeedbackShown`;
    /// later calls leave the state and history alone.
    pub fn show_feedback(&mut self, cfg: &FeedbackConfig, at: OffsetDateTime) -> Result<FeedbackBundle> {
        if self.state < SessionState::VarianceFitted {
            return Err(state_error(format!(
                "full feedback needs a fitted variance prior (now {:?})",
                self.state
            )));
        }
        let bundle = feedback_bundle(&self.model()?, cfg)?;
        if self.state == SessionState::VarianceFitted {
            self.commit(Event::FeedbackShown { config: cfg.clone() }, at)?;
        }
        Ok(bundle)
    }

    /// Feedback configuration with this session's seed.
    pub fn feedback_config(&self) -> FeedbackConfig {
        FeedbackConfig { seed: self.seed, ..FeedbackConfig::default() }
    }

    /// The expert accepts the fitted distributions.
    pub fn conclude(&mut self, note: Option<String>, at: OffsetDateTime) -> Result<()> {
        self.commit(Event::Concluded { note }, at)
    }

    /// Rebuilds the record from its history alone.
    pub fn replay(&self) -> Result<SessionRecord> {
        let mut s = Self::blank(self.id.clone());
        s.schema_version = self.schema_version;
        for (i, entry) in self.history.iter().enumerate() {
            if entry.seq != i as u64 {
                return Err(ElicitError::validation(
                    "history-sequence",
                    format!("entry {i} has sequence number {}", entry.seq),
                ));
            }
            if matches!(entry.event, Event::RevisionOpened { .. } | Event::MeanFitted { revision: true, .. } | Event::VarianceFitted { revision: true, .. })
                && s.state == SessionState::Concluded
            {
                s.state = SessionState::FeedbackShown;
            }
            s.apply(&entry.event).map_err(|e| {
                ElicitError::validation("history-replay", format!("entry {i}: {e}"))
            })?;
            s.history.push(entry.clone());
        }
        Ok(s)
    }

    /// Recomputes every stored fit from the recorded judgements and checks
    /// that nothing is stale.
    pub fn verify(&self) -> Result<()> {
        self.validate()?;
        for entry in &self.history {
            match &entry.event {
                Event::MeanFitted { quantiles, family, prior, anchor, .. } => {
                    let again = fit_location_family(quantiles, *family)?;
                    if &again != prior {
                        return Err(ElicitError::validation(
                            "fits-reproducible",
                            format!("location fit at entry {} does not recompute", entry.seq),
                        ));
                    }
                    if location_anchor(self.transform, &again)? != *anchor {
                        return Err(ElicitError::validation(
                            "anchor-current",
                            format!("anchor at entry {} is not g(median)", entry.seq),
                        ));
                    }
                }
                Event::VarianceFitted { proportion, family, variance_quantiles: vq, prior, .. } => {
                    let vq2 = variance_quantiles(proportion)?;
                    let again = fit_variance_prior(&vq2, *family)?;
                    if vq2 != *vq || &again != prior {
                        return Err(ElicitError::validation(
                            "fits-reproducible",
                            format!("variance fit at entry {} does not recompute", entry.seq),
                        ));
                    }
                }
                _ => {}
            }
        }
        if let (Some(p), Some(loc)) = (&self.judgements.proportion, &self.fits.location) {
            if p.anchor != location_anchor(self.transform, loc)? {
                return Err(ElicitError::validation(
                    "anchor-current",
                    "proportion anchor is not the current location median",
                ));
            }
        }
        Ok(())
    }

    /// Checks the document-level invariants, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        use SessionState::*;
        fn v(invariant: &str, msg: impl Into<String>) -> ElicitError {
            ElicitError::validation(invariant, msg)
        }
        if self.schema_version != SCHEMA_VERSION {
            return Err(v("schema-version", format!("unsupported version {}", self.schema_version)));
        }
        if self.id.is_empty() {
            return Err(v("id-present", "session id is empty"));
        }
        let j = &self.judgements;
        if let (Some(l), Some(u)) = (j.lower, j.upper) {
            if !(l < u) {
                return Err(v("bounds-order", format!("L = {l} is not below U = {u}")));
            }
            if !(self.transform.in_support(l) && self.transform.in_support(u)) {
                return Err(v("bounds-support", format!("bounds outside the {} transform's support", self.transform)));
            }
            for q in &j.mean_quantiles {
                if !(q.value > l && q.value < u) {
                    return Err(v("mean-quantiles-within-bounds", format!("{} not in ({l}, {u})", q.value)));
                }
            }
        } else if self.state > Created {
            return Err(v("bounds-present", "bounds missing after state Created"));
        }
        check_increasing(&j.mean_quantiles)
            .map_err(|e| v("mean-quantiles-increasing", e.to_string()))?;
        if let Some(p) = &j.proportion {
            p.validate().map_err(|e| v("proportion-order", e.to_string()))?;
            if self.fits.anchor != Some(p.anchor) {
                return Err(v("proportion-anchor", "anchor differs from the fitted location"));
            }
        }
        let has_loc = self.fits.location.is_some();
        let has_var = self.fits.variance.is_some();
        let loc_ok = has_loc == (self.state >= MeanFitted);
        let var_ok = has_var == (self.state >= VarianceFitted);
        if !loc_ok || !var_ok || has_loc != self.fits.anchor.is_some() {
            return Err(v("fits-match-state", format!("fits inconsistent with state {:?}", self.state)));
        }
        for w in self.history.windows(2) {
            if w[1].timestamp < w[0].timestamp {
                return Err(v("history-chronological", format!("entry {} precedes entry {}", w[1].seq, w[0].seq)));
            }
        }
        if !matches!(self.history.first().map(|h| &h.event), Some(Event::Created { .. })) {
            return Err(v("history-starts-created", "history must begin with a creation event"));
        }
        let replayed = self.replay()?;
        if replayed != *self {
            return Err(v("history-replay", "replaying the history does not reproduce the record"));
        }
        Ok(())
    }

    /// Serialized session document.
    pub fn export(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| ElicitError::Parse(e.to_string()))
    }

    /// Parses and validates a session document.
    pub fn import(doc: &str) -> Result<SessionRecord> {
        let value: serde_json::Value = serde_json::from_str(doc).map_err(|e| {
            ElicitError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        match value.get("schema_version").and_then(|v| v.as_u64()) {
            Some(v) if v == SCHEMA_VERSION as u64 => {}
            Some(v) => {
                return Err(ElicitError::Parse(format!(
                    "unknown schema version {v} (this build reads version {SCHEMA_VERSION})"
                )))
            }
            None => return Err(ElicitError::Parse("missing schema_version".into())),
        }
        let record: SessionRecord = serde_json::from_str(doc).map_err(|e| {
            ElicitError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
        })?;
        record.validate()?;
        Ok(record)
    }
}
