mod common;

use common::{bisect, invgamma_cdf_quadrature, phi, phi_inv, type7, OracleRng};
use elicit_core::feedback::{
    feedback_bundle, pointwise_cdf_band, population_quantile_interval, sample_parameters,
    variance_overlay_densities, FeedbackConfig, PopulationModel,
};
use elicit_core::fitting::{
    fit_variance_prior, LocationPrior, VariancePrior, VarianceQuantiles,
};
use elicit_core::numerics::{
    Distribution, InverseGammaParams, LogNormalParams, NormalParams, PrecisionFamily,
    PrecisionFamilyTag,
};
use elicit_core::transforms::Transform;

fn normal_prior(mean: f64, variance: f64) -> LocationPrior {
    LocationPrior {
        distribution: Distribution::Normal(NormalParams::new(mean, variance).unwrap()),
        fitted_from: vec![],
        residual: 0.0,
    }
}

fn ig_prior(a: f64, b: f64) -> VariancePrior {
    let ig = InverseGammaParams::new(a, b).unwrap();
    VariancePrior {
        distribution: PrecisionFamily::InverseGamma(ig),
        fitted_to: VarianceQuantiles::new(
            elicit_core::numerics::invgamma_quantile(0.05, &ig).unwrap(),
            elicit_core::numerics::invgamma_quantile(0.95, &ig).unwrap(),
        )
        .unwrap(),
        residual: 0.0,
    }
}

fn model(mean: f64, v: f64, a: f64, b: f64) -> PopulationModel {
    PopulationModel::new(Transform::Identity, normal_prior(mean, v), ig_prior(a, b), 5.0, 70.0).unwrap()
}

fn cfg(k: usize, seed: u64) -> FeedbackConfig {
    FeedbackConfig { k, seed, ..FeedbackConfig::default() }
}

fn ks_distance(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn draws_match_priors() {
    let m = model(35.0, 9.24, 31.5, 2514.0);
    let d = sample_parameters(&m, &cfg(10_000, 7)).unwrap();
    let ks_mu = ks_distance(d.mu.clone(), |x| phi((x - 35.0) / 9.24f64.sqrt()));
    let ks_s2 = ks_distance(d.sigma2.clone(), |x| invgamma_cdf_quadrature(31.5, 2514.0, x));
    assert!(ks_mu < 0.05, "{ks_mu}");
    assert!(ks_s2 < 0.05, "{ks_s2}");
    // the two samples are not correlated
    let n = d.mu.len() as f64;
    let (mm, ms) = (d.mu.iter().sum::<f64>() / n, d.sigma2.iter().sum::<f64>() / n);
    let cov: f64 = d.mu.iter().zip(&d.sigma2).map(|(a, b)| (a - mm) * (b - ms)).sum::<f64>() / n;
    let sd = |v: &[f64], m: f64| (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n).sqrt();
    let corr = cov / (sd(&d.mu, mm) * sd(&d.sigma2, ms));
    assert!(corr.abs() < 0.05, "{corr}");
}

#[test]
fn inverse_gamma_draw_quantiles() {
    let m = model(35.0, 9.24, 31.5, 2514.0);
    let mut s = sample_parameters(&m, &cfg(100_000, 11)).unwrap().sigma2;
    s.sort_by(f64::total_cmp);
    let oracle_05 = bisect(|x| invgamma_cdf_quadrature(31.5, 2514.0, x), 0.05, 1.0, 500.0);
    let oracle_95 = bisect(|x| invgamma_cdf_quadrature(31.5, 2514.0, x), 0.95, 1.0, 500.0);
    let (q05, q95) = (type7(&s, 0.05), type7(&s, 0.95));
    assert!((q05 / oracle_05 - 1.0).abs() < 0.02, "{q05} vs {oracle_05}");
    assert!((q95 / oracle_95 - 1.0).abs() < 0.02, "{q95} vs {oracle_95}");
    assert!((q05 / 60.9 - 1.0).abs() < 0.02);
    assert!((q95 / 109.8 - 1.0).abs() < 0.02);
}

#[test]
fn point_mass_location_prior() {
    let m = model(35.0, 1e-300, 31.5, 2514.0);
    let d = sample_parameters(&m, &cfg(1000, 3)).unwrap();
    assert!(d.mu.iter().all(|&x| x == 35.0));
    let i = population_quantile_interval(&m, 0.5, &cfg(1000, 3)).unwrap();
    assert_eq!((i.lower, i.upper), (35.0, 35.0));
}

#[test]
fn determinism_and_thread_independence() {
    let m = model(35.0, 9.24, 62.8, 7114.0);
    let c = cfg(2000, 42);
    let a = serde_json::to_string(&feedback_bundle(&m, &c).unwrap()).unwrap();
    let b = serde_json::to_string(&feedback_bundle(&m, &c).unwrap()).unwrap();
    assert_eq!(a, b);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let s = single.install(|| serde_json::to_string(&feedback_bundle(&m, &c).unwrap()).unwrap());
    assert_eq!(a, s);
    let other = serde_json::to_string(&feedback_bundle(&m, &cfg(2000, 43)).unwrap()).unwrap();
    assert_ne!(a, other);
}

#[test]
fn band_shape() {
    let m = PopulationModel::new(
        Transform::Identity,
        normal_prior(35.0, 9.24),
        ig_prior(62.8, 7114.0),
        -100.0,
        70.0,
    )
    .unwrap();
    let b = pointwise_cdf_band(&m, &cfg(3000, 5)).unwrap();
    assert!(b.cdf_upper[0] < 1e-9, "far lower tail: {}", b.cdf_upper[0]);
    for i in 0..b.grid.len() {
        assert!(b.cdf_lower[i] <= b.cdf_median[i] && b.cdf_median[i] <= b.cdf_upper[i]);
        if i > 0 {
            assert!(b.cdf_lower[i] >= b.cdf_lower[i - 1]);
            assert!(b.cdf_median[i] >= b.cdf_median[i - 1]);
            assert!(b.cdf_upper[i] >= b.cdf_upper[i - 1]);
        }
    }
}

#[test]
fn degenerate_priors_collapse_band() {
    let m = model(35.0, 1e-300, 1e6, 1e6 * 64.0);
    let b = pointwise_cdf_band(&m, &cfg(500, 1)).unwrap();
    for (i, &x) in b.grid.iter().enumerate() {
        let f = phi((x - 35.0) / 8.0);
        assert!((b.cdf_lower[i] - f).abs() < 5e-3 && (b.cdf_upper[i] - f).abs() < 5e-3, "x={x}");
    }
}

#[test]
fn band_at_mean_matches_resimulation() {
    let m = PopulationModel::new(
        Transform::Identity,
        normal_prior(35.0, 9.24),
        ig_prior(62.8, 7114.0),
        34.0,
        36.0,
    )
    .unwrap();
    let c = FeedbackConfig { k: 10_000, j: 3, seed: 9, ..FeedbackConfig::default() };
    let b = pointwise_cdf_band(&m, &c).unwrap();
    assert_eq!(b.grid[1], 35.0);
    let (lo, hi) = (b.cdf_lower[1], b.cdf_upper[1]);
    assert!(lo < 0.5 && 0.5 < hi);

    let mut r = OracleRng::new(2024);
    let mut f: Vec<f64> = (0..10_000)
        .map(|_| {
            let mu = 35.0 + 9.24f64.sqrt() * r.normal();
            let s2 = r.inverse_gamma(62.8, 7114.0);
            phi((35.0 - mu) / s2.sqrt())
        })
        .collect();
    f.sort_by(f64::total_cmp);
    let (olo, ohi) = (type7(&f, 0.025), type7(&f, 0.975));
    assert!((olo - lo).abs() < 0.02, "{olo} vs {lo}");
    assert!((ohi - hi).abs() < 0.02, "{ohi} vs {hi}");
    // sd(μ)/σ ≈ 0.29 makes the 95% band about 0.43 wide here
    assert!(((hi - lo) - (ohi - olo)).abs() < 0.03);
}

#[test]
fn pointwise_coverage() {
    let m = model(35.0, 9.24, 31.5, 2514.0);
    let c = FeedbackConfig { k: 100_000, j: 60, seed: 77, ..FeedbackConfig::default() };
    let b = pointwise_cdf_band(&m, &c).unwrap();
    let mut r = OracleRng::new(31337);
    let fresh: Vec<(f64, f64)> = (0..20_000)
        .map(|_| (35.0 + 9.24f64.sqrt() * r.normal(), r.inverse_gamma(31.5, 2514.0).sqrt()))
        .collect();
    for (i, &x) in b.grid.iter().enumerate() {
        let inside = fresh
            .iter()
            .filter(|(mu, s)| {
                let f = phi((x - mu) / s);
                f >= b.cdf_lower[i] && f <= b.cdf_upper[i]
            })
            .count();
        let cov = inside as f64 / fresh.len() as f64;
        assert!((cov - 0.95).abs() <= 0.02, "x={x} coverage {cov}");
    }
}

#[test]
fn quantile_intervals_are_ordered() {
    let m = model(35.0, 9.24, 31.5, 2514.0);
    let c = cfg(5000, 2);
    let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for k in 1..20 {
        let i = population_quantile_interval(&m, k as f64 / 20.0, &c).unwrap();
        assert!(i.lower >= prev.0 && i.upper >= prev.1);
        assert!(i.lower < i.upper);
        prev = (i.lower, i.upper);
    }
}

#[test]
fn worked_example_quantile_intervals() {
    let m = model(35.0, 9.24, 31.5, 2514.0);
    let c = FeedbackConfig { k: 100_000, ..FeedbackConfig::default() };
    let lo = population_quantile_interval(&m, 0.05, &c).unwrap();
    let hi = population_quantile_interval(&m, 0.95, &c).unwrap();
    assert!((lo.lower - 12.0).abs() <= 4.0 && (lo.upper - 23.0).abs() <= 4.0, "{lo:?}");
    assert!((hi.lower - 47.0).abs() <= 4.0 && (hi.upper - 58.0).abs() <= 4.0, "{hi:?}");
}

#[test]
fn log_transform_commutes_with_quantiles() {
    let (ml, sl) = (3.0, 0.2);
    let vp = fit_variance_prior(
        &VarianceQuantiles::new(0.01, 0.04).unwrap(),
        PrecisionFamilyTag::InverseGamma,
    )
    .unwrap();
    let logm = PopulationModel::new(
        Transform::Log,
        LocationPrior {
            distribution: Distribution::LogNormal(LogNormalParams::new(ml, sl).unwrap()),
            fitted_from: vec![],
            residual: 0.0,
        },
        vp.clone(),
        1.0,
        100.0,
    )
    .unwrap();
    let base = PopulationModel::new(Transform::Identity, normal_prior(ml, sl * sl), vp, 0.0, 4.6).unwrap();
    let c = cfg(4000, 8);
    for alpha in [0.05, 0.5, 0.95] {
        let a = population_quantile_interval(&logm, alpha, &c).unwrap();
        let b = population_quantile_interval(&base, alpha, &c).unwrap();
        assert!((a.lower / b.lower.exp() - 1.0).abs() < 1e-12);
        assert!((a.upper / b.upper.exp() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn overlay_curves() {
    let vq = VarianceQuantiles::new(60.87, 109.8).unwrap();
    let grid: Vec<f64> = (0..=700).map(|i| i as f64 * 0.1).collect();
    let [narrow, wide] = variance_overlay_densities(35.0, &vq, &grid, Transform::Identity).unwrap();
    let argmax = |d: &[f64]| {
        (0..d.len()).max_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap()
    };
    assert_eq!(grid[argmax(&narrow.density)], 35.0);
    assert_eq!(grid[argmax(&wide.density)], 35.0);
    let peak = |s2: f64| 1.0 / (2.0 * std::f64::consts::PI * s2).sqrt();
    assert!((narrow.density[350] - peak(60.87)).abs() < 1e-12);
    assert!((wide.density[350] - peak(109.8)).abs() < 1e-12);
    assert!(narrow.density[350] > wide.density[350]);
}

#[test]
fn minimum_k_runs() {
    let m = model(35.0, 9.24, 31.5, 2514.0);
    let b = feedback_bundle(&m, &cfg(2, 1)).unwrap();
    assert_eq!(b.grid.len(), 300);
    assert!(feedback_bundle(&m, &cfg(1, 1)).is_err());
}

#[test]
fn oracle_quantile_sanity() {
    // the bisection oracle itself against a tabulated value
    assert!((phi_inv(0.975) - 1.959_964).abs() < 1e-6);
}
