//! Monte Carlo feedback on the fitted population model.
//!
//! Parameter pairs (μₖ, σ²ₖ) are drawn from the two priors; every summary is
//! then a deterministic function of those draws. Each grid point is reduced
//! independently, so results do not depend on the number of threads.
//!
//! Random numbers come from ChaCha8 seeded with the 64-bit session seed: stream
//! 0 feeds the location draws and stream 1 the variance draws, so the two
//! samples are independent and each is reproducible on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution as _, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ElicitError, Result};
use crate::fitting::{LocationPrior, VariancePrior, VarianceQuantiles};
use crate::numerics::special::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
use crate::numerics::{ContinuousDist, Distribution, PrecisionFamily};
use crate::transforms::Transform;

const MU_STREAM: u64 = 0;
const SIGMA2_STREAM: u64 = 1;

/// The elicited object: X | μ, σ² ~ N(μ, σ²) on the transformed scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationModel {
    pub transform: Transform,
    /// Prior for the mean (median φ on the original scale under a transform).
    pub location: LocationPrior,
    pub variance: VariancePrior,
    /// Plausible bounds L and U on the original scale.
    pub lower: f64,
    pub upper: f64,
}

impl PopulationModel {
    pub fn new(
        transform: Transform,
        location: LocationPrior,
        variance: VariancePrior,
        lower: f64,
        upper: f64,
    ) -> Result<Self> {
        let m = Self { transform, location, variance, lower, upper };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        check_bounds(self.transform, self.lower, self.upper)?;
        self.location.validate()?;
        self.variance.distribution.validate()?;
        let (lo, hi) = self.location.distribution.support();
        let (tlo, thi) = self.transform.support();
        if lo < tlo || hi > thi {
            return Err(ElicitError::domain(format!(
                "a {} location prior can place mass outside the {} transform's support",
                self.location.family(),
                self.transform
            )));
        }
        Ok(())
    }

    /// m̂ = g(median of the location prior).
    pub fn anchor(&self) -> f64 {
        self.transform.forward(self.location.median())
    }
}

pub(crate) fn check_bounds(t: Transform, lower: f64, upper: f64) -> Result<()> {
    if !(lower.is_finite() && upper.is_finite() && lower < upper) {
        return Err(ElicitError::judgement(format!(
            "lower bound {lower} must be below upper bound {upper}"
        )));
    }
    t.check_support(lower)?;
    t.check_support(upper)
}

fn default_k() -> usize {
    300
}
fn default_j() -> usize {
    300
}
fn default_seed() -> u64 {
    1
}
fn default_band_level() -> f64 {
    0.95
}
fn default_interval_level() -> f64 {
    0.90
}
fn default_quantiles() -> Vec<f64> {
    vec![0.05, 0.95]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackConfig {
    /// Number of (μ, σ²) draws.
    #[serde(rename = "K", default = "default_k")]
    pub k: usize,
    /// Number of grid points between L and U.
    #[serde(rename = "J", default = "default_j")]
    pub j: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Coverage of the pointwise CDF band.
    #[serde(default = "default_band_level")]
    pub band_level: f64,
    /// Coverage of each population-quantile interval.
    #[serde(default = "default_interval_level")]
    pub quantile_interval_level: f64,
    /// Population quantiles to report intervals for.
    #[serde(default = "default_quantiles")]
    pub quantiles: Vec<f64>,
}

impl Default for FeedbackConfig {
    fn default() -> Self {
        Self {
            k: default_k(),
            j: default_j(),
            seed: default_seed(),
            band_level: default_band_level(),
            quantile_interval_level: default_interval_level(),
            quantiles: default_quantiles(),
        }
    }
}

impl FeedbackConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ElicitError::InvalidConfig(m));
        if self.k < 2 {
            return bad(format!("K must be at least 2, got {}", self.k));
        }
        if self.j < 2 {
            return bad(format!("J must be at least 2, got {}", self.j));
        }
        for (name, p) in [
            ("band_level", self.band_level),
            ("quantile_interval_level", self.quantile_interval_level),
        ] {
            if !(p > 0.0 && p < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {p}"));
            }
        }
        if let Some(p) = self.quantiles.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return bad(format!("population quantiles must lie in (0, 1), got {p}"));
        }
        Ok(())
    }
}

/// K parameter draws; `mu` is on the transformed scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterDraws {
    pub mu: Vec<f64>,
    pub sigma2: Vec<f64>,
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn draw_location(d: &Distribution, r: &mut ChaCha8Rng) -> f64 {
    match *d {
        Distribution::Normal(p) => {
            let z: f64 = r.sample(StandardNormal);
            p.mean + p.sd() * z
        }
        Distribution::LogNormal(p) => {
            let z: f64 = r.sample(StandardNormal);
            (p.meanlog + p.sdlog * z).exp()
        }
        Distribution::Beta(p) => {
            let b = Beta::new(p.alpha, p.beta).expect("validated beta parameters");
            p.lower + (p.upper - p.lower) * b.sample(r)
        }
        Distribution::InverseGamma(_) | Distribution::Gamma(_) => {
            unreachable!("not a location family")
        }
    }
}

fn draw_variance(d: &PrecisionFamily, r: &mut ChaCha8Rng) -> f64 {
    match *d {
        // σ² = b / G with G ~ Gamma(a, 1)
        PrecisionFamily::InverseGamma(p) => {
            let g = Gamma::new(p.shape, 1.0).expect("validated shape");
            p.scale / g.sample(r)
        }
        PrecisionFamily::GammaPrecision(p) => {
            let g = Gamma::new(p.shape, 1.0).expect("validated shape");
            p.rate / g.sample(r)
        }
        PrecisionFamily::LogNormalPrecision(p) => {
            let z: f64 = r.sample(StandardNormal);
            (-(p.meanlog + p.sdlog * z)).exp()
        }
    }
}

/// Draws μ₁…μ_K from the location prior (mapped through g) and σ²₁…σ²_K
/// from the variance prior, independently.
pub fn sample_parameters(model: &PopulationModel, cfg: &FeedbackConfig) -> Result<ParameterDraws> {
    model.validate()?;
    cfg.validate()?;
    Ok(draws(model, cfg.k, cfg.seed))
}

fn draws(model: &PopulationModel, k: usize, seed: u64) -> ParameterDraws {
    let mut r = rng(seed, MU_STREAM);
    let mu = (0..k)
        .map(|_| model.transform.forward(draw_location(&model.location.distribution, &mut r)))
        .collect();
    let mut r = rng(seed, SIGMA2_STREAM);
    let sigma2 = (0..k)
        .map(|_| draw_variance(&model.variance.distribution, &mut r))
        .collect();
    ParameterDraws { mu, sigma2 }
}

/// Linear interpolation between order statistics (type 7) of a sorted slice.
pub fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// J evenly spaced points with x₁ = L and x_J = U exactly.
pub fn grid(lower: f64, upper: f64, j: usize) -> Vec<f64> {
    let step = (upper - lower) / (j - 1) as f64;
    (0..j)
        .map(|i| if i + 1 == j { upper } else { lower + step * i as f64 })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfBand {
    pub grid: Vec<f64>,
    pub cdf_lower: Vec<f64>,
    pub cdf_median: Vec<f64>,
    pub cdf_upper: Vec<f64>,
}

fn band_from_draws(d: &ParameterDraws, grid: Vec<f64>, t: Transform, level: f64) -> CdfBand {
    let sigma: Vec<f64> = d.sigma2.iter().map(|s| s.sqrt()).collect();
    let (plo, phi) = ((1.0 - level) / 2.0, (1.0 + level) / 2.0);
    let rows: Vec<(f64, f64, f64)> = grid
        .par_iter()
        .map(|&x| {
            let y = t.forward(x);
            let mut f: Vec<f64> = d
                .mu
                .iter()
                .zip(&sigma)
                .map(|(m, s)| std_normal_cdf((y - m) / s))
                .collect();
            f.sort_unstable_by(f64::total_cmp);
            (
                empirical_quantile(&f, plo),
                empirical_quantile(&f, 0.5),
                empirical_quantile(&f, phi),
            )
        })
        .collect();
    CdfBand {
        grid,
        cdf_lower: rows.iter().map(|r| r.0).collect(),
        cdf_median: rows.iter().map(|r| r.1).collect(),
        cdf_upper: rows.iter().map(|r| r.2).collect(),
    }
}

/// Pointwise central interval, at `band_level`, for P(X ≤ xⱼ | μ, σ²) over an
/// even grid on [L, U], plus the pointwise median.
pub fn pointwise_cdf_band(model: &PopulationModel, cfg: &FeedbackConfig) -> Result<CdfBand> {
    let d = sample_parameters(model, cfg)?;
    let g = grid(model.lower, model.upper, cfg.j);
    Ok(band_from_draws(&d, g, model.transform, cfg.band_level))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileInterval {
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
}

fn interval_from_draws(d: &ParameterDraws, alpha: f64, level: f64, t: Transform) -> QuantileInterval {
    let z = std_normal_quantile(alpha);
    let mut x: Vec<f64> = d
        .mu
        .iter()
        .zip(&d.sigma2)
        .map(|(m, s)| m + s.sqrt() * z)
        .collect();
    x.sort_unstable_by(f64::total_cmp);
    QuantileInterval {
        alpha,
        lower: t.invert(empirical_quantile(&x, (1.0 - level) / 2.0)),
        upper: t.invert(empirical_quantile(&x, (1.0 + level) / 2.0)),
    }
}

/// Central interval, at `quantile_interval_level`, for the population's
/// `alpha` quantile X₍α₎ = μ + σΦ⁻¹(α), on the original scale.
pub fn population_quantile_interval(
    model: &PopulationModel,
    alpha: f64,
    cfg: &FeedbackConfig,
) -> Result<QuantileInterval> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ElicitError::domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let d = sample_parameters(model, cfg)?;
    Ok(interval_from_draws(&d, alpha, cfg.quantile_interval_level, model.transform))
}

/// A normal population density at fixed (m̂, σ²), on the original scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    /// Level of the variance quantile this curve is drawn at.
    pub alpha: f64,
    pub sigma2: f64,
    pub density: Vec<f64>,
}

fn population_density(x: f64, m_hat: f64, sigma: f64, t: Transform) -> f64 {
    if !t.in_support(x) {
        return 0.0;
    }
    std_normal_pdf((t.forward(x) - m_hat) / sigma) / sigma * t.derivative(x)
}

/// Population densities N(m̂, σ²) at the lower and upper elicited variance
/// quantiles, evaluated on `grid`.
pub fn variance_overlay_densities(
    m_hat: f64,
    vq: &VarianceQuantiles,
    grid: &[f64],
    t: Transform,
) -> Result<[DensityCurve; 2]> {
    vq.validate()?;
    let curve = |alpha: f64, s2: f64| DensityCurve {
        alpha,
        sigma2: s2,
        density: grid
            .iter()
            .map(|&x| population_density(x, m_hat, s2.sqrt(), t))
            .collect(),
    };
    Ok([curve(vq.level_lo, vq.sigma2_05), curve(vq.level_hi, vq.sigma2_95)])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadingData {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub k1: f64,
    pub k2: f64,
    /// Population proportion inside [k1, k2].
    pub mass: f64,
}

/// Data for the proportion-question explainer: a population density with the
/// region [k1, k2] shaded, and the mass of that region.
pub fn proportion_shading_data(
    m_hat: f64,
    sigma: f64,
    interval: (f64, f64),
    bounds: (f64, f64),
    j: usize,
    t: Transform,
) -> Result<ShadingData> {
    let (k1, k2) = interval;
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(ElicitError::domain(format!("sigma must be > 0, got {sigma}")));
    }
    if !(k1 <= k2) {
        return Err(ElicitError::domain(format!("interval [{k1}, {k2}] is reversed")));
    }
    t.check_support(k1)?;
    t.check_support(k2)?;
    check_bounds(t, bounds.0, bounds.1)?;
    if j < 2 {
        return Err(ElicitError::InvalidConfig("J must be at least 2".into()));
    }
    let g = grid(bounds.0, bounds.1, j);
    let density = g.iter().map(|&x| population_density(x, m_hat, sigma, t)).collect();
    let mass = if k1 == k2 {
        0.0
    } else {
        std_normal_cdf((t.forward(k2) - m_hat) / sigma) - std_normal_cdf((t.forward(k1) - m_hat) / sigma)
    };
    Ok(ShadingData { grid: g, density, k1, k2, mass })
}

/// Summaries of the location prior alone, shown after the mean fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationSummary {
    pub quantiles: Vec<LocationQuantile>,
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocationQuantile {
    pub alpha: f64,
    pub value: f64,
}

/// Default percentiles reported for the location prior.
pub const LOCATION_SUMMARY_LEVELS: [f64; 5] = [0.01, 0.05, 0.5, 0.95, 0.99];

pub fn location_summary(
    prior: &LocationPrior,
    bounds: (f64, f64),
    levels: &[f64],
    j: usize,
) -> Result<LocationSummary> {
    prior.validate()?;
    if !(bounds.0 < bounds.1) || j < 2 {
        return Err(ElicitError::InvalidConfig("need L < U and J ≥ 2".into()));
    }
    let mut quantiles = Vec::with_capacity(levels.len());
    for &alpha in levels {
        crate::numerics::check_probability(alpha)?;
        quantiles.push(LocationQuantile { alpha, value: prior.quantile(alpha) });
    }
    let g = grid(bounds.0, bounds.1, j);
    let density = g.iter().map(|&x| prior.distribution.pdf(x)).collect();
    Ok(LocationSummary { quantiles, grid: g, density })
}

/// Everything the facilitator shows after the variance fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackBundle {
    pub config: FeedbackConfig,
    pub transform: Transform,
    /// m̂ on the transformed scale.
    pub anchor: f64,
    pub grid: Vec<f64>,
    pub cdf_lower: Vec<f64>,
    pub cdf_median: Vec<f64>,
    pub cdf_upper: Vec<f64>,
    pub quantile_intervals: Vec<QuantileInterval>,
    pub overlay_curves: [DensityCurve; 2],
}

/// Runs the whole feedback computation from a single set of draws.
pub fn feedback_bundle(model: &PopulationModel, cfg: &FeedbackConfig) -> Result<FeedbackBundle> {
    let d = sample_parameters(model, cfg)?;
    let t = model.transform;
    let band = band_from_draws(&d, grid(model.lower, model.upper, cfg.j), t, cfg.band_level);
    let quantile_intervals = cfg
        .quantiles
        .iter()
        .map(|&a| interval_from_draws(&d, a, cfg.quantile_interval_level, t))
        .collect();
    let anchor = model.anchor();
    let overlay_curves = variance_overlay_densities(anchor, &model.variance.fitted_to, &band.grid, t)?;
    Ok(FeedbackBundle {
        config: cfg.clone(),
        transform: t,
        anchor,
        grid: band.grid,
        cdf_lower: band.cdf_lower,
        cdf_median: band.cdf_median,
        cdf_upper: band.cdf_upper,
        quantile_intervals,
        overlay_curves,
    })
}
