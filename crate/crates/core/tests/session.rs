mod support;

use elicit_core::fitting::fit_normal_from_two_quantiles;
use elicit_core::numerics::{ContinuousDist, PrecisionFamilyTag};
use elicit_core::session::{
    Event, FileStore, ProportionInput, RevisionInput, RevisionTarget, SessionContext,
    SessionRecord, SessionState,
};
use elicit_core::transforms::Transform;
use proptest::prelude::*;
use support::{first_fit, minute, q, worked_example, GOLDEN};

fn bounds_set() -> SessionRecord {
    let mut s = SessionRecord::create("s", SessionContext::default(), Transform::Identity, 1, minute(0));
    s.record_bounds(5.0, 70.0, minute(1)).unwrap();
    s
}

#[test]
fn golden_session_document() {
    let doc = worked_example().export().unwrap();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(GOLDEN, &doc).unwrap();
    }
    let golden = std::fs::read_to_string(GOLDEN).expect("golden file present");
    assert_eq!(doc, golden);
}

#[test]
fn golden_replays_to_final_state() {
    let doc = std::fs::read_to_string(GOLDEN).unwrap();
    let s = SessionRecord::import(&doc).unwrap();
    assert_eq!(s.state, SessionState::Concluded);
    assert_eq!(s.replay().unwrap(), s);
    s.verify().unwrap();
    assert_eq!(s.export().unwrap(), doc);
}

#[test]
fn worked_example_fits() {
    let s = worked_example();
    let n = s.fits.location.as_ref().unwrap().as_normal().unwrap();
    assert_eq!(n.mean, 35.0);
    assert!((n.variance - 9.24).abs() < 0.005);
    assert_eq!((n.quantile(0.01).round(), n.quantile(0.99).round()), (28.0, 42.0));
    let ig = s.fits.variance.as_ref().unwrap().distribution.as_inverse_gamma().unwrap();
    assert!((ig.shape / 62.8 - 1.0).abs() < 0.05 && (ig.scale / 7114.0 - 1.0).abs() < 0.05);
    // the first fit stays in the history
    let first = s.history.iter().find_map(|h| match &h.event {
        Event::VarianceFitted { prior, revision: false, .. } => prior.distribution.as_inverse_gamma(),
        _ => None,
    });
    let first = first.unwrap();
    assert!((first.shape / 31.5 - 1.0).abs() < 0.05 && (first.scale / 2514.0 - 1.0).abs() < 0.05);
}

#[test]
fn bounds_checks() {
    let mut s = SessionRecord::create("s", SessionContext::default(), Transform::Identity, 1, minute(0));
    assert_eq!(s.record_bounds(70.0, 5.0, minute(1)).unwrap_err().code(), "invalid-judgement");
    s.record_bounds(5.0, 70.0, minute(1)).unwrap();
    assert_eq!(s.state, SessionState::BoundsSet);
    let mut l = SessionRecord::create("l", SessionContext::default(), Transform::Log, 1, minute(0));
    assert_eq!(l.record_bounds(0.0, 70.0, minute(1)).unwrap_err().code(), "domain-error");
    assert_eq!(l.history.len(), 1);
}

#[test]
fn mean_quantile_checks() {
    let mut s = bounds_set();
    let e = s
        .record_mean_quantiles_and_fit(vec![q(0.05, 30.0), q(0.95, 80.0)], None, minute(2))
        .unwrap_err();
    assert_eq!(e.code(), "invalid-judgement");
    assert_eq!(s.state, SessionState::BoundsSet);

    let base = fit_normal_from_two_quantiles(q(0.05, 30.0), q(0.95, 40.0)).unwrap();
    s.record_mean_quantiles_and_fit(vec![q(0.05, 30.0), q(0.5, 35.0), q(0.95, 40.0)], None, minute(2))
        .unwrap();
    assert_eq!(s.fits.location.as_ref().unwrap().as_normal().unwrap(), base);
    assert_eq!(s.state, SessionState::MeanFitted);
    let summary = s.mean_feedback(100).unwrap();
    assert_eq!(summary.quantiles[0].value.round(), 28.0);
    assert_eq!(summary.quantiles[4].value.round(), 42.0);
}

#[test]
fn out_of_order_commands_are_state_errors() {
    let mut s = SessionRecord::create("s", SessionContext::default(), Transform::Identity, 1, minute(0));
    let e = s
        .record_mean_quantiles_and_fit(vec![q(0.05, 30.0), q(0.95, 40.0)], None, minute(1))
        .unwrap_err();
    assert_eq!(e.code(), "state-error");
    let mut s = bounds_set();
    let e = s.record_proportion_and_fit(ProportionInput::new(10.0, 0.33, 0.4), minute(2)).unwrap_err();
    assert_eq!(e.code(), "state-error");
    let e = s.revise(RevisionTarget::Proportion, None, minute(2)).unwrap_err();
    assert_eq!(e.code(), "state-error");
    let e = s.conclude(None, minute(2)).unwrap_err();
    assert_eq!(e.code(), "state-error");
    let mut f = first_fit();
    // acceptance requires feedback first
    assert_eq!(f.conclude(None, minute(30)).unwrap_err().code(), "state-error");
    assert_eq!(f.history.len(), 4);
}

#[test]
fn proportion_ordering_and_warnings() {
    let mut s = bounds_set();
    s.record_mean_quantiles_and_fit(vec![q(0.05, 30.0), q(0.95, 40.0)], None, minute(2)).unwrap();
    let e = s.record_proportion_and_fit(ProportionInput::new(10.0, 0.40, 0.33), minute(3)).unwrap_err();
    assert_eq!(e.code(), "invalid-judgement");
    let e = s.record_proportion_and_fit(ProportionInput::new(10.0, 0.3, 0.5), minute(3)).unwrap_err();
    assert_eq!(e.code(), "domain-error");
    s.record_proportion_and_fit(ProportionInput::new(10.0, 0.05, 0.10), minute(3)).unwrap();
    assert_eq!(s.fits.warnings.len(), 2);
    assert_eq!(s.judgements.proportion.unwrap().anchor, 35.0);
}

#[test]
fn identical_revision_keeps_fits_and_grows_history() {
    let mut s = worked_example();
    let before = s.clone();
    let n = s.history.len();
    s.revise(
        RevisionTarget::Proportion,
        Some(RevisionInput::Proportion(ProportionInput::new(10.0, 0.30, 0.35))),
        minute(50),
    )
    .unwrap();
    assert_eq!(s.history.len(), n + 1);
    assert_eq!(s.fits, before.fits);
    assert_eq!(&s.history[..n], &before.history[..]);
    assert_eq!(s.state, SessionState::VarianceFitted);

    let mut m = first_fit();
    let fits = m.fits.clone();
    m.revise(
        RevisionTarget::Mean,
        Some(RevisionInput::Mean { quantiles: vec![q(0.05, 30.0), q(0.95, 40.0)], family: None }),
        minute(21),
    )
    .unwrap();
    assert_eq!(m.fits, fits);
    assert_eq!(m.state, SessionState::VarianceFitted);
    assert_eq!(m.replay().unwrap(), m);
}

#[test]
fn mean_revision_invalidates_variance() {
    let mut s = first_fit();
    s.revise(
        RevisionTarget::Mean,
        Some(RevisionInput::Mean { quantiles: vec![q(0.05, 32.0), q(0.95, 44.0)], family: None }),
        minute(21),
    )
    .unwrap();
    assert_eq!(s.state, SessionState::MeanFitted);
    assert!(s.fits.variance.is_none());
    assert!(s.judgements.proportion.is_none());
    assert_eq!(s.fits.anchor, Some(38.0));
    // the new proportion question is anchored at the new median
    s.record_proportion_and_fit(ProportionInput::new(10.0, 0.33, 0.40), minute(22)).unwrap();
    assert_eq!(s.judgements.proportion.unwrap().anchor, 38.0);
    s.verify().unwrap();
}

#[test]
fn open_revisions_wait_for_judgements() {
    let mut s = worked_example();
    s.revise(RevisionTarget::Proportion, None, minute(50)).unwrap();
    assert_eq!(s.state, SessionState::ProportionElicited);
    assert!(s.fits.variance.is_none());
    let cfg = s.feedback_config();
    assert_eq!(s.show_feedback(&cfg, minute(51)).unwrap_err().code(), "state-error");
    s.record_proportion_and_fit(ProportionInput::new(10.0, 0.31, 0.36), minute(52)).unwrap();
    assert_eq!(s.state, SessionState::VarianceFitted);

    s.revise(RevisionTarget::Mean, None, minute(53)).unwrap();
    assert_eq!(s.state, SessionState::MeanElicited);
    assert!(s.fits.location.is_none());
    let e = s.record_proportion_and_fit(ProportionInput::new(10.0, 0.3, 0.35), minute(54)).unwrap_err();
    assert_eq!(e.code(), "state-error");
    s.record_mean_quantiles_and_fit(vec![q(0.05, 30.0), q(0.95, 40.0)], None, minute(55)).unwrap();
    assert_eq!(s.state, SessionState::MeanFitted);
    assert_eq!(s.replay().unwrap(), s);
    s.validate().unwrap();
}

#[test]
fn feedback_transition_is_idempotent() {
    let mut s = first_fit();
    let cfg = s.feedback_config();
    let a = s.show_feedback(&cfg, minute(25)).unwrap();
    let n = s.history.len();
    let b = s.show_feedback(&cfg, minute(26)).unwrap();
    assert_eq!(a, b);
    assert_eq!(s.history.len(), n);
    assert_eq!(s.state, SessionState::FeedbackShown);
}

#[test]
fn export_import_round_trip() {
    for s in [bounds_set(), first_fit(), worked_example()] {
        let doc = s.export().unwrap();
        let back = SessionRecord::import(&doc).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.export().unwrap(), doc);
    }
}

#[test]
fn import_rejects_bad_documents() {
    let doc = worked_example().export().unwrap();
    let e = SessionRecord::import(&doc.replacen("\"schema_version\": 1", "\"schema_version\": 99", 1)).unwrap_err();
    assert_eq!(e.code(), "parse-error");
    let e = SessionRecord::import("{\"schema_version\": 1, \"id\": ").unwrap_err();
    assert_eq!(e.code(), "parse-error");
    assert!(e.to_string().contains("line 1"), "{e}");

    let mut v: serde_json::Value = serde_json::from_str(&doc).unwrap();
    v["judgements"]["L"] = serde_json::json!(80.0);
    let e = SessionRecord::import(&v.to_string()).unwrap_err();
    match e {
        elicit_core::ElicitError::Validation { invariant, .. } => assert_eq!(invariant, "bounds-order"),
        other => panic!("{other:?}"),
    }

    let mut v: serde_json::Value = serde_json::from_str(&doc).unwrap();
    v["state"] = serde_json::json!("MeanFitted");
    let e = SessionRecord::import(&v.to_string()).unwrap_err();
    assert_eq!(e.code(), "validation-error");

    // editing a stored fit is caught by replay
    let mut v: serde_json::Value = serde_json::from_str(&doc).unwrap();
    v["fits"]["variance"]["distribution"]["shape"] = serde_json::json!(40.0);
    match SessionRecord::import(&v.to_string()).unwrap_err() {
        elicit_core::ElicitError::Validation { invariant, .. } => assert_eq!(invariant, "history-replay"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn verify_catches_tampered_history() {
    let doc = worked_example().export().unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&doc).unwrap();
    // change the recorded fit consistently in history and state
    let shape = serde_json::json!(40.0);
    v["fits"]["variance"]["distribution"]["shape"] = shape.clone();
    let last_fit = v["history"]
        .as_array()
        .unwrap()
        .iter()
        .rposition(|h| h["event"]["type"] == "variance-fitted")
        .unwrap();
    v["history"][last_fit]["event"]["prior"]["distribution"]["shape"] = shape;
    let s = SessionRecord::import(&v.to_string()).unwrap();
    match s.verify().unwrap_err() {
        elicit_core::ElicitError::Validation { invariant, .. } => assert_eq!(invariant, "fits-reproducible"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn precision_family_choice_is_recorded() {
    let mut s = bounds_set();
    s.record_mean_quantiles_and_fit(vec![q(0.05, 30.0), q(0.95, 40.0)], None, minute(2)).unwrap();
    let mut input = ProportionInput::new(10.0, 0.33, 0.40);
    input.family = PrecisionFamilyTag::LogNormalPrecision;
    s.record_proportion_and_fit(input, minute(3)).unwrap();
    assert_eq!(s.judgements.precision_family, Some(PrecisionFamilyTag::LogNormalPrecision));
    s.verify().unwrap();
}

#[test]
fn file_store_round_trip_and_concurrency() {
    let dir = tempfile::tempdir().unwrap();
    let store = FileStore::open(dir.path()).unwrap();
    let s = worked_example();
    store.save(&s).unwrap();
    assert_eq!(store.load("translation-times").unwrap(), s);
    assert_eq!(store.load("missing").unwrap_err().code(), "not-found");
    assert_eq!(store.load("../etc").unwrap_err().code(), "not-found");

    std::thread::scope(|scope| {
        for i in 0..8 {
            let store = store.clone();
            scope.spawn(move || {
                let mut s = SessionRecord::create(format!("s{i}"), SessionContext::default(), Transform::Identity, i, minute(0));
                for k in 0..5 {
                    if k == 0 {
                        s.record_bounds(5.0, 70.0, minute(1)).unwrap();
                    } else {
                        s.record_mean_quantiles_and_fit(
                            vec![q(0.05, 30.0 + k as f64), q(0.95, 40.0 + i as f64)],
                            None,
                            minute(1 + k),
                        )
                        .unwrap();
                    }
                    store.save(&s).unwrap();
                }
            });
        }
    });
    let ids = store.list().unwrap();
    assert_eq!(ids.len(), 9);
    for i in 0..8 {
        let s = store.load(&format!("s{i}")).unwrap();
        assert_eq!(s.history.len(), 6);
        assert_eq!(s.judgements.mean_quantiles[1].value, 40.0 + i as f64);
    }
}

#[derive(Debug, Clone)]
enum Cmd {
    Mean(f64, f64),
    Proportion(f64, f64),
    Feedback,
    Revise(bool, bool),
    Conclude,
}

fn cmd() -> impl Strategy<Value = Cmd> {
    prop_oneof![
        (20.0f64..35.0, 1.0f64..20.0).prop_map(|(a, w)| Cmd::Mean(a, a + w)),
        (0.1f64..0.3, 0.01f64..0.15).prop_map(|(t, d)| Cmd::Proportion(t, t + d)),
        Just(Cmd::Feedback),
        (any::<bool>(), any::<bool>()).prop_map(|(m, j)| Cmd::Revise(m, j)),
        Just(Cmd::Conclude),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn replay_reproduces_any_command_sequence(cmds in prop::collection::vec(cmd(), 1..12)) {
        let mut s = bounds_set();
        let cfg = elicit_core::feedback::FeedbackConfig { k: 50, j: 10, ..Default::default() };
        for (i, c) in cmds.into_iter().enumerate() {
            let at = minute(10 + i as i64);
            let before = s.history.clone();
            let _ = match c {
                Cmd::Mean(a, b) => s.record_mean_quantiles_and_fit(vec![q(0.05, a), q(0.95, b)], None, at).map(|_| ()),
                Cmd::Proportion(lo, hi) => s.record_proportion_and_fit(ProportionInput::new(10.0, lo, hi), at).map(|_| ()),
                Cmd::Feedback => s.show_feedback(&cfg, at).map(|_| ()),
                Cmd::Revise(mean, with) => {
                    let (target, input) = if mean {
                        (RevisionTarget::Mean, with.then(|| RevisionInput::Mean { quantiles: vec![q(0.05, 30.0), q(0.95, 40.0)], family: None }))
                    } else {
                        (RevisionTarget::Proportion, with.then(|| RevisionInput::Proportion(ProportionInput::new(10.0, 0.3, 0.35))))
                    };
                    s.revise(target, input, at)
                }
                Cmd::Conclude => s.conclude(None, at),
            };
            // history is append-only
            prop_assert_eq!(&s.history[..before.len()], &before[..]);
            prop_assert!(s.history.len() <= before.len() + 1);
            prop_assert_eq!(s.replay().unwrap(), s.clone());
            s.validate().unwrap();
        }
        s.verify().unwrap();
    }
}
