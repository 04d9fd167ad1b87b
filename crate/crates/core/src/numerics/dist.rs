use serde::{Deserialize, Serialize};

use super::solve::{increasing_root, inverse_gamma_pq};
use super::special::{
    beta_inc, gamma_density, gamma_p, gamma_q, ln_beta, std_normal_cdf, std_normal_pdf,
    std_normal_quantile,
};
use crate::error::{ElicitError, Result};

/// Density, distribution and quantile functions of a univariate distribution.
///
/// Out-of-support arguments give a density of 0 and a CDF of 0 or 1;
/// `quantile` returns NaN for probabilities outside (0, 1).
pub trait ContinuousDist {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn quantile(&self, p: f64) -> f64;
    /// Closed support interval (endpoints may be infinite).
    fn support(&self) -> (f64, f64);
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ElicitError::domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ElicitError::domain(format!("{name} must be finite, got {v}")))
    }
}

/// Normal distribution N(mean, variance).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalParams {
    pub mean: f64,
    pub variance: f64,
}

impl NormalParams {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        let p = Self { mean, variance };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("normal mean", self.mean)?;
        check_positive("normal variance", self.variance)
    }

    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

impl ContinuousDist for NormalParams {
    fn pdf(&self, x: f64) -> f64 {
        let sd = self.sd();
        std_normal_pdf((x - self.mean) / sd) / sd
    }

    fn cdf(&self, x: f64) -> f64 {
        std_normal_cdf((x - self.mean) / self.sd())
    }

    fn quantile(&self, p: f64) -> f64 {
        self.mean + self.sd() * std_normal_quantile(p)
    }

    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// Inverse-gamma distribution IG(shape a, scale b) with density
/// `b^a / Γ(a) · x^{-a-1} · exp(-b/x)` on x > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseGammaParams {
    pub shape: f64,
    pub scale: f64,
}

impl InverseGammaParams {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        let p = Self { shape, scale };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("inverse-gamma shape", self.shape)?;
        check_positive("inverse-gamma scale", self.scale)
    }

    /// Mean b/(a−1), defined only for a > 1.
    pub fn mean(&self) -> Option<f64> {
        (self.shape > 1.0).then(|| self.scale / (self.shape - 1.0))
    }
}

impl ContinuousDist for InverseGammaParams {
    fn pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) || x.is_infinite() {
            return 0.0;
        }
        gamma_density(self.shape, self.scale / x) * self.scale / (x * x)
    }

    fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        gamma_q(self.shape, self.scale / x)
    }

    fn quantile(&self, p: f64) -> f64 {
        if !(p > 0.0 && p < 1.0) {
            return f64::NAN;
        }
        // F(x) = Q(a, b/x): the upper gamma tail at y = b/x carries probability p
        self.scale / inverse_gamma_pq(self.shape, 1.0 - p, p)
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// Gamma distribution with shape and rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub shape: f64,
    pub rate: f64,
}

impl GammaParams {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        let p = Self { shape, rate };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("gamma shape", self.shape)?;
        check_positive("gamma rate", self.rate)
    }
}

impl ContinuousDist for GammaParams {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 || x.is_infinite() {
            return 0.0;
        }
        gamma_density(self.shape, self.rate * x) * self.rate
    }

    fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        gamma_p(self.shape, self.rate * x)
    }

    fn quantile(&self, p: f64) -> f64 {
        if !(p > 0.0 && p < 1.0) {
            return f64::NAN;
        }
        inverse_gamma_pq(self.shape, p, 1.0 - p) / self.rate
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// Lognormal distribution: `ln X ~ N(meanlog, sdlog²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogNormalParams {
    pub meanlog: f64,
    pub sdlog: f64,
}

impl LogNormalParams {
    pub fn new(meanlog: f64, sdlog: f64) -> Result<Self> {
        let p = Self { meanlog, sdlog };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_finite("lognormal meanlog", self.meanlog)?;
        check_positive("lognormal sdlog", self.sdlog)
    }
}

impl ContinuousDist for LogNormalParams {
    fn pdf(&self, x: f64) -> f64 {
        if !(x > 0.0) || x.is_infinite() {
            return 0.0;
        }
        std_normal_pdf((x.ln() - self.meanlog) / self.sdlog) / (self.sdlog * x)
    }

    fn cdf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 0.0;
        }
        std_normal_cdf((x.ln() - self.meanlog) / self.sdlog)
    }

    fn quantile(&self, p: f64) -> f64 {
        (self.meanlog + self.sdlog * std_normal_quantile(p)).exp()
    }

    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
}

/// Beta(alpha, beta) rescaled to the interval [lower, upper].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub lower: f64,
    #[serde(default = "one")]
    pub upper: f64,
}

fn one() -> f64 {
    1.0
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self::scaled(alpha, beta, 0.0, 1.0)
    }

    pub fn scaled(alpha: f64, beta: f64, lower: f64, upper: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            lower,
            upper,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("beta alpha", self.alpha)?;
        check_positive("beta beta", self.beta)?;
        check_finite("beta lower", self.lower)?;
        check_finite("beta upper", self.upper)?;
        if self.lower >= self.upper {
            return Err(ElicitError::domain("beta support requires lower < upper"));
        }
        Ok(())
    }

    fn width(&self) -> f64 {
        self.upper - self.lower
    }

    fn to_unit(&self, x: f64) -> f64 {
        (x - self.lower) / self.width()
    }
}

impl ContinuousDist for BetaParams {
    fn pdf(&self, x: f64) -> f64 {
        let t = self.to_unit(x);
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        let ln = (self.alpha - 1.0) * t.ln() + (self.beta - 1.0) * (1.0 - t).ln()
            - ln_beta(self.alpha, self.beta);
        ln.exp() / self.width()
    }

    fn cdf(&self, x: f64) -> f64 {
        beta_inc(self.alpha, self.beta, self.to_unit(x))
    }

    fn quantile(&self, p: f64) -> f64 {
        if !(p > 0.0 && p < 1.0) {
            return f64::NAN;
        }
        let (a, b) = (self.alpha, self.beta);
        let guess = {
            let m = a / (a + b);
            (m / (1.0 - m)).ln()
        };
        // solve on the logit of the unit-scale variable
        let f = |u: f64| {
            let t = 1.0 / (1.0 + (-u).exp());
            let dens =
                ((a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln() - ln_beta(a, b)).exp();
            (beta_inc(a, b, t) - p, dens * t * (1.0 - t))
        };
        let u = increasing_root(f, guess, 1.0);
        let t = 1.0 / (1.0 + (-u).exp());
        self.lower + self.width() * t
    }

    fn support(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }
}

/// Any of the supported families, tagged for serialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Distribution {
    Normal(NormalParams),
    InverseGamma(InverseGammaParams),
    Gamma(GammaParams),
    LogNormal(LogNormalParams),
    Beta(BetaParams),
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            Distribution::Normal(p) => p.validate(),
            Distribution::InverseGamma(p) => p.validate(),
            Distribution::Gamma(p) => p.validate(),
            Distribution::LogNormal(p) => p.validate(),
            Distribution::Beta(p) => p.validate(),
        }
    }

    fn inner(&self) -> &dyn ContinuousDist {
        match self {
            Distribution::Normal(p) => p,
            Distribution::InverseGamma(p) => p,
            Distribution::Gamma(p) => p,
            Distribution::LogNormal(p) => p,
            Distribution::Beta(p) => p,
        }
    }
}

impl ContinuousDist for Distribution {
    fn pdf(&self, x: f64) -> f64 {
        self.inner().pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        self.inner().cdf(x)
    }
    fn quantile(&self, p: f64) -> f64 {
        self.inner().quantile(p)
    }
    fn support(&self) -> (f64, f64) {
        self.inner().support()
    }
}

/// Which parametric family carries the uncertainty about the population variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecisionFamilyTag {
    #[default]
    InverseGamma,
    GammaPrecision,
    LogNormalPrecision,
}

impl std::str::FromStr for PrecisionFamilyTag {
    type Err = ElicitError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inverse-gamma" | "ig" => Ok(Self::InverseGamma),
            "gamma-precision" | "gamma" => Ok(Self::GammaPrecision),
            "lognormal-precision" | "lognormal" => Ok(Self::LogNormalPrecision),
            other => Err(ElicitError::domain(format!("unknown precision family '{other}'"))),
        }
    }
}

/// A distribution for σ², stated either directly on the variance or on the
/// precision τ = 1/σ².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum PrecisionFamily {
    /// σ² ~ IG(shape, scale).
    InverseGamma(InverseGammaParams),
    /// τ ~ Gamma(shape, rate); identical to σ² ~ IG(shape, rate).
    GammaPrecision(GammaParams),
    /// ln τ ~ N(meanlog, sdlog²).
    LogNormalPrecision(LogNormalParams),
}

impl PrecisionFamily {
    pub fn tag(&self) -> PrecisionFamilyTag {
        match self {
            PrecisionFamily::InverseGamma(_) => PrecisionFamilyTag::InverseGamma,
            PrecisionFamily::GammaPrecision(_) => PrecisionFamilyTag::GammaPrecision,
            PrecisionFamily::LogNormalPrecision(_) => PrecisionFamilyTag::LogNormalPrecision,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PrecisionFamily::InverseGamma(p) => p.validate(),
            PrecisionFamily::GammaPrecision(p) => p.validate(),
            PrecisionFamily::LogNormalPrecision(p) => p.validate(),
        }
    }

    /// P(σ² ≤ s).
    pub fn variance_cdf(&self, s: f64) -> f64 {
        if !(s > 0.0) {
            return 0.0;
        }
        match self {
            PrecisionFamily::InverseGamma(p) => p.cdf(s),
            PrecisionFamily::GammaPrecision(p) => gamma_q(p.shape, p.rate / s),
            // σ² ≤ s  ⇔  ln τ ≥ −ln s
            PrecisionFamily::LogNormalPrecision(p) => std_normal_cdf((s.ln() + p.meanlog) / p.sdlog),
        }
    }

    /// The `alpha` quantile of σ².
    pub fn variance_quantile(&self, alpha: f64) -> f64 {
        match self {
            PrecisionFamily::InverseGamma(p) => p.quantile(alpha),
            PrecisionFamily::GammaPrecision(p) => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return f64::NAN;
                }
                p.rate / inverse_gamma_pq(p.shape, 1.0 - alpha, alpha)
            }
            PrecisionFamily::LogNormalPrecision(p) => {
                (-p.meanlog + p.sdlog * std_normal_quantile(alpha)).exp()
            }
        }
    }

    /// Density of σ².
    pub fn variance_pdf(&self, s: f64) -> f64 {
        match self {
            PrecisionFamily::InverseGamma(p) => p.pdf(s),
            PrecisionFamily::GammaPrecision(p) => InverseGammaParams {
                shape: p.shape,
                scale: p.rate,
            }
            .pdf(s),
            PrecisionFamily::LogNormalPrecision(p) => LogNormalParams {
                meanlog: -p.meanlog,
                sdlog: p.sdlog,
            }
            .pdf(s),
        }
    }

    /// The equivalent inverse-gamma parameters, when the family has them.
    pub fn as_inverse_gamma(&self) -> Option<InverseGammaParams> {
        match self {
            PrecisionFamily::InverseGamma(p) => Some(*p),
            PrecisionFamily::GammaPrecision(p) => Some(InverseGammaParams {
                shape: p.shape,
                scale: p.rate,
            }),
            PrecisionFamily::LogNormalPrecision(_) => None,
        }
    }
}

/// Φ((x − m)/√v), validated.
pub fn normal_cdf(x: f64, p: &NormalParams) -> Result<f64> {
    p.validate()?;
    if !x.is_finite() {
        return Err(ElicitError::domain(format!("normal_cdf requires finite x, got {x}")));
    }
    Ok(p.cdf(x))
}

pub fn normal_quantile(alpha: f64, p: &NormalParams) -> Result<f64> {
    p.validate()?;
    check_probability(alpha)?;
    Ok(p.quantile(alpha))
}

/// CDF of IG(a, b) at `x`: Q(a, b/x). Returns 0 for x ≤ 0.
pub fn invgamma_cdf(x: f64, p: &InverseGammaParams) -> Result<f64> {
    p.validate()?;
    if x.is_nan() {
        return Err(ElicitError::domain("invgamma_cdf requires a number"));
    }
    Ok(p.cdf(x))
}

pub fn invgamma_quantile(alpha: f64, p: &InverseGammaParams) -> Result<f64> {
    p.validate()?;
    check_probability(alpha)?;
    Ok(p.quantile(alpha))
}

/// Density of any supported family; 0 outside the support.
pub fn dist_pdf(x: f64, d: &Distribution) -> Result<f64> {
    d.validate()?;
    Ok(d.pdf(x))
}

pub(crate) fn check_probability(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(ElicitError::domain(format!("probability must lie in (0, 1), got {alpha}")))
    }
}
