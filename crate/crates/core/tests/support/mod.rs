//! The translation-times session, built through the public workflow API.

#![allow(dead_code)]

use elicit_core::fitting::QuantileJudgement;
use elicit_core::session::{
    ProportionInput, RevisionInput, RevisionTarget, SessionContext, SessionRecord,
};
use elicit_core::transforms::Transform;
use time::macros::datetime;
use time::{Duration, OffsetDateTime};

pub const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/worked_example_session.json");

pub fn minute(n: i64) -> OffsetDateTime {
    datetime!(2014-06-02 10:00 UTC) + Duration::minutes(n)
}

pub fn context() -> SessionContext {
    SessionContext {
        date: Some("2014-06-02".into()),
        purpose: Some("Prior for the distribution of page translation times".into()),
        quantity: Some(
            "Time in minutes for the expert to translate a randomly selected page of \
             'The art of creative writing' from English into Arabic"
                .into(),
        ),
        expert: Some("Translator".into()),
        facilitator: Some("Facilitator".into()),
        training_notes: Some("Three practice questions, two using this method".into()),
        notes: None,
    }
}

pub fn q(alpha: f64, value: f64) -> QuantileJudgement {
    QuantileJudgement { alpha, value }
}

/// Up to and including the first variance fit.
pub fn first_fit() -> SessionRecord {
    let mut s = SessionRecord::create("translation-times", context(), Transform::Identity, 20_140_602, minute(0));
    s.record_bounds(5.0, 70.0, minute(5)).unwrap();
    s.record_mean_quantiles_and_fit(vec![q(0.05, 30.0), q(0.95, 40.0)], None, minute(12)).unwrap();
    s.record_proportion_and_fit(ProportionInput::new(10.0, 0.33, 0.40), minute(20)).unwrap();
    s
}

/// The whole session: first fit, feedback, revision to (0.30, 0.35), feedback
/// again, and acceptance.
pub fn worked_example() -> SessionRecord {
    let mut s = first_fit();
    let cfg = s.feedback_config();
    s.show_feedback(&cfg, minute(25)).unwrap();
    s.revise(
        RevisionTarget::Proportion,
        Some(RevisionInput::Proportion(ProportionInput::new(10.0, 0.30, 0.35))),
        minute(31),
    )
    .unwrap();
    s.show_feedback(&cfg, minute(34)).unwrap();
    s.conclude(Some("Expert agreed the fitted distribution is a reasonable representation".into()), minute(40))
        .unwrap();
    s
}
