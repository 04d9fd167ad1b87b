use std::fs;
use std::io::Write;
use std::path::Path;

use elicit_core::feedback::{feedback_bundle, FeedbackBundle, FeedbackConfig, PopulationModel};
use elicit_core::fitting::{
    parse_proportion, LocationFamily, LocationPrior, QuantileJudgement, VariancePrior, VarianceQuantiles,
};
use elicit_core::numerics::{
    ContinuousDist, Distribution, InverseGammaParams, NormalParams, PrecisionFamily, PrecisionFamilyTag,
};
use elicit_core::report::{
    fit_mean, fit_precision, MeanFitReport, PrecisionFitReport, SessionView, ValidationReport,
};
use elicit_core::session::SessionRecord;
use elicit_core::transforms::Transform;
use elicit_core::ElicitError;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::{Cli, Command, Failure, Feedback, FitMean, FitPrecision, Format, SessionFile};

type Outcome = Result<(), Failure>;

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::FitMean(a) => run_fit_mean(a, cli.json),
        Command::FitPrecision(a) => run_fit_precision(a, cli.json),
        Command::Feedback(a) => run_feedback(a),
        Command::Validate(a) => run_validate(a, cli.json, false),
        Command::Replay(a) => run_validate(a, cli.json, true),
    }
}

fn print_json<T: Serialize>(v: &T) -> Outcome {
    let text = serde_json::to_string_pretty(v).map_err(|e| ElicitError::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

/// `key: value` lines for a flat JSON object such as a tagged distribution.
fn print_fields(v: &Value) {
    if let Value::Object(map) = v {
        for (k, v) in map {
            match v {
                Value::String(s) => println!("{k}: {s}"),
                other => println!("{k}: {other}"),
            }
        }
    }
}

fn read(path: &Path) -> Result<String, ElicitError> {
    fs::read_to_string(path).map_err(|e| ElicitError::Io(format!("{}: {e}", path.display())))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, ElicitError> {
    serde_json::from_str(&read(path)?).map_err(|e| ElicitError::Parse(format!("{}: {e}", path.display())))
}

fn run_fit_mean(a: &FitMean, json: bool) -> Outcome {
    if a.probs.len() != a.vals.len() {
        return Err(Failure::Usage(format!(
            "--probs has {} entries but --vals has {}",
            a.probs.len(),
            a.vals.len()
        )));
    }
    if a.probs.len() < 2 {
        return Err(Failure::Usage("need at least two prob/val pairs".into()));
    }
    let judgements = a
        .probs
        .iter()
        .zip(&a.vals)
        .map(|(&p, &v)| QuantileJudgement::new(p, v))
        .collect::<Result<Vec<_>, _>>()?;
    let family = LocationFamily::parse(&a.family, a.lower, a.upper)?;
    let levels: Vec<f64> = a.ql.into_iter().chain(a.qu).collect();
    let r: MeanFitReport = fit_mean(&judgements, a.lower, a.upper, Some(family), &levels)?;
    if json {
        return print_json(&r);
    }
    print_fields(&serde_json::to_value(r.prior.distribution).expect("distribution serializes"));
    println!("residual: {:e}", r.prior.residual);
    for q in &r.quantiles {
        println!("quantile {}: {}", q.alpha, q.value);
    }
    Ok(())
}

fn pair<T: Copy>(v: &[T], flag: &str) -> Result<(T, T), Failure> {
    match v {
        [a, b] => Ok((*a, *b)),
        _ => Err(Failure::Usage(format!("{flag} takes exactly two comma-separated values"))),
    }
}

fn run_fit_precision(a: &FitPrecision, json: bool) -> Outcome {
    let interval = pair(&a.interval, "--interval")?;
    let thetas = match a.propvals.as_slice() {
        [lo, hi] => (parse_proportion(lo)?, parse_proportion(hi)?),
        _ => return Err(Failure::Usage("--propvals takes exactly two comma-separated values".into())),
    };
    let family: PrecisionFamilyTag = a.family.parse()?;
    let transform: Transform = a.transform.parse()?;
    let r: PrecisionFitReport = fit_precision(transform, interval, thetas, family)?;
    if json {
        return print_json(&r);
    }
    print_fields(&serde_json::to_value(r.prior.distribution).expect("distribution serializes"));
    println!("residual: {:e}", r.prior.residual);
    println!("anchor: {}", r.proportion.anchor);
    println!("c: {}", r.proportion.width);
    println!("sigma2_05: {}", r.variance_quantiles.sigma2_05);
    println!("sigma2_95: {}", r.variance_quantiles.sigma2_95);
    for w in &r.robustness.warnings {
        println!("warning: {w}");
    }
    Ok(())
}

fn model_from_flags(a: &Feedback) -> Result<(PopulationModel, u64), Failure> {
    if let Some(path) = &a.session {
        let s = SessionRecord::import(&read(path)?)?;
        return Ok((s.model()?, s.seed));
    }
    let location: LocationPrior = match (&a.mean_fit, a.mean, a.variance) {
        (Some(path), _, _) => read_json::<MeanFitReport>(path)?.prior,
        (None, Some(mean), Some(variance)) => LocationPrior {
            distribution: Distribution::Normal(NormalParams { mean, variance }),
            fitted_from: Vec::new(),
            residual: 0.0,
        },
        _ => return Err(Failure::Usage("give --session, --mean-fit, or --mean and --variance".into())),
    };
    let (variance, fitted_transform): (VariancePrior, Option<Transform>) = match (&a.precision_fit, a.shape, a.scale) {
        (Some(path), _, _) => {
            let r = read_json::<PrecisionFitReport>(path)?;
            (r.prior, Some(r.transform))
        }
        (None, Some(shape), Some(scale)) => {
            let ig = InverseGammaParams::new(shape, scale)?;
            let vq = VarianceQuantiles::new(ig.quantile(0.05), ig.quantile(0.95))?;
            let prior = VariancePrior {
                distribution: PrecisionFamily::InverseGamma(ig),
                fitted_to: vq,
                residual: 0.0,
            };
            (prior, None)
        }
        _ => return Err(Failure::Usage("give --session, --precision-fit, or --shape and --scale".into())),
    };
    let transform = match (&a.transform, fitted_transform) {
        (Some(t), _) => t.parse()?,
        (None, Some(t)) => t,
        (None, None) => Transform::Identity,
    };
    let (Some(lower), Some(upper)) = (a.lower, a.upper) else {
        return Err(Failure::Usage("--lower and --upper are required without --session".into()));
    };
    Ok((PopulationModel::new(transform, location, variance, lower, upper)?, 1))
}

fn run_feedback(a: &Feedback) -> Outcome {
    let (model, default_seed) = model_from_flags(a)?;
    let cfg = FeedbackConfig {
        k: a.k,
        j: a.j,
        seed: a.seed.unwrap_or(default_seed),
        band_level: a.band_level,
        quantile_interval_level: a.level,
        quantiles: a.quantiles.clone(),
    };
    let bundle = feedback_bundle(&model, &cfg)?;
    let bytes = match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&bundle).map_err(|e| ElicitError::Io(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => band_csv(&bundle)?,
    };
    match &a.output {
        Some(path) => fs::write(path, bytes).map_err(|e| ElicitError::Io(format!("{}: {e}", path.display())))?,
        None => std::io::stdout().write_all(&bytes).map_err(ElicitError::from)?,
    }
    Ok(())
}

fn band_csv(b: &FeedbackBundle) -> Result<Vec<u8>, ElicitError> {
    let io = |e: csv::Error| ElicitError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "cdf_lower", "cdf_median", "cdf_upper"]).map_err(io)?;
    for i in 0..b.grid.len() {
        w.serialize((b.grid[i], b.cdf_lower[i], b.cdf_median[i], b.cdf_upper[i])).map_err(io)?;
    }
    w.into_inner().map_err(|e| ElicitError::Io(e.to_string()))
}

fn run_validate(a: &SessionFile, json: bool, replay: bool) -> Outcome {
    let s = SessionRecord::import(&read(&a.file)?)?;
    if replay {
        s.verify()?;
    }
    if json {
        return if replay {
            print_json(&SessionView::of(&s.replay()?)?)
        } else {
            print_json(&ValidationReport {
                id: s.id.clone(),
                state: s.state,
                events: s.history.len(),
                replayed: true,
                verified: false,
            })
        };
    }
    println!("{}: valid, state {:?}, {} events", s.id, s.state, s.history.len());
    if replay {
        for h in &s.history {
            let v = serde_json::to_value(h).map_err(|e| ElicitError::Io(e.to_string()))?;
            let (at, kind) = (v["timestamp"].as_str().unwrap_or(""), v["event"]["type"].as_str().unwrap_or(""));
            println!("  {:>3}  {at}  {kind}", h.seq);
        }
        println!("replay reproduces the stored state; all fits recompute");
    }
    Ok(())
}
