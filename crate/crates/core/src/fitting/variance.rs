use serde::{Deserialize, Serialize};

use super::optim::{minimize, SimplexOptions};
use super::{ProportionJudgement, QuantileJudgement, VarianceQuantiles};
use crate::error::{ElicitError, Result};
use crate::numerics::check_probability;
use crate::numerics::special::std_normal_quantile;
use crate::numerics::{
    GammaParams, InverseGammaParams, LogNormalParams, PrecisionFamily, PrecisionFamilyTag,
};

/// Largest shape accepted from the variance fit. Near-identical σ² quantiles
/// push the shape towards infinity; beyond this the fit is reported as failed.
pub const MAX_SHAPE: f64 = 1e6;

/// θ quantiles inside this band give σ estimates that are insensitive to
/// small misjudgements of θ.
pub const ROBUST_THETA_BAND: (f64, f64) = (0.2, 0.45);

const OBJECTIVE_TOL: f64 = 1e-12;

/// Fitted prior for the population variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariancePrior {
    pub distribution: PrecisionFamily,
    pub fitted_to: VarianceQuantiles,
    /// Σ (F(σ²ᵢ) − levelᵢ)² at the fitted parameters.
    pub residual: f64,
}

impl VariancePrior {
    pub fn cdf(&self, s: f64) -> f64 {
        self.distribution.variance_cdf(s)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        self.distribution.variance_quantile(p)
    }

    pub fn pdf(&self, s: f64) -> f64 {
        self.distribution.variance_pdf(s)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 0.5 {
        Ok(())
    } else {
        Err(ElicitError::domain(format!(
            "proportion θ must lie strictly between 0 and 0.5, got {theta}"
        )))
    }
}

fn check_width(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(ElicitError::domain(format!("interval width c must be > 0, got {c}")))
    }
}

/// σ² = (c / Φ⁻¹(θ + ½))²: the variance at which a normal population puts
/// proportion θ in `[m, m + c]`.
///
/// A θ judged at level p yields the σ² quantile at level `alpha_out = 1 − p`,
/// since larger proportions imply smaller variances.
pub fn sigma2_quantile_from_theta(c: f64, theta: f64, alpha_out: f64) -> Result<QuantileJudgement> {
    check_width(c)?;
    check_theta(theta)?;
    check_probability(alpha_out)?;
    Ok(QuantileJudgement {
        alpha: alpha_out,
        value: sigma2_from_theta(c, theta),
    })
}

fn sigma2_from_theta(c: f64, theta: f64) -> f64 {
    let z = std_normal_quantile(theta + 0.5);
    (c / z) * (c / z)
}

/// σ² quantiles implied by a proportion judgement.
pub fn variance_quantiles(p: &ProportionJudgement) -> Result<VarianceQuantiles> {
    p.validate()?;
    // θ_hi (judged at level_hi) gives the small-variance quantile
    let lo = sigma2_quantile_from_theta(p.width, p.theta_hi, 1.0 - p.level_hi)?;
    let hi = sigma2_quantile_from_theta(p.width, p.theta_lo, 1.0 - p.level_lo)?;
    let vq = VarianceQuantiles {
        sigma2_05: lo.value,
        sigma2_95: hi.value,
        level_lo: lo.alpha,
        level_hi: hi.alpha,
    };
    vq.validate()?;
    Ok(vq)
}

/// The suggested interval width: a third of the way from m̂ to U.
pub fn suggest_c(m_hat: f64, upper: f64) -> Result<f64> {
    if !(m_hat.is_finite() && upper.is_finite() && upper > m_hat) {
        return Err(ElicitError::domain(format!(
            "upper bound {upper} must exceed the fitted location {m_hat}"
        )));
    }
    Ok((upper - m_hat) / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSensitivity {
    pub theta: f64,
    pub log_sigma: f64,
    /// |d log σ / dθ|.
    pub gradient: f64,
    pub in_robust_band: bool,
}

/// How strongly log σ reacts to the expert's θ.
pub fn theta_sensitivity(theta: f64, c: f64) -> Result<ThetaSensitivity> {
    check_width(c)?;
    check_theta(theta)?;
    let log_sigma = |t: f64| c.ln() - std_normal_quantile(t + 0.5).ln();
    let h = 1e-6_f64.min(0.5 * theta).min(0.5 * (0.5 - theta));
    let gradient = ((log_sigma(theta + h) - log_sigma(theta - h)) / (2.0 * h)).abs();
    Ok(ThetaSensitivity {
        theta,
        log_sigma: log_sigma(theta),
        gradient,
        in_robust_band: (ROBUST_THETA_BAND.0..=ROBUST_THETA_BAND.1).contains(&theta),
    })
}

/// Facilitator warnings for θ judgements outside the robust band.
pub fn theta_warnings(p: &ProportionJudgement) -> Vec<String> {
    let (lo, hi) = ROBUST_THETA_BAND;
    [("lower", p.theta_lo), ("upper", p.theta_hi)]
        .iter()
        .filter(|(_, t)| !(lo..=hi).contains(t))
        .map(|(which, t)| {
            let hint = if *t < lo {
                "consider repeating the question with a larger interval width c"
            } else {
                "consider repeating the question with a smaller interval width c"
            };
            format!(
                "{which} proportion quantile {t} is outside [{lo}, {hi}], where the implied σ is most sensitive to θ; {hint}"
            )
        })
        .collect()
}

/// Fits a variance prior of the given family to two σ² quantiles.
///
/// The inverse-gamma and gamma-on-precision families minimise
/// Σ (F(σ²ᵢ) − levelᵢ)² over (log a, log b) with a restarted simplex, then
/// polish with Newton steps on the two-equation system. The lognormal-on-
/// precision family has a closed form.
pub fn fit_variance_prior(vq: &VarianceQuantiles, family: PrecisionFamilyTag) -> Result<VariancePrior> {
    vq.validate()?;
    match family {
        PrecisionFamilyTag::LogNormalPrecision => {
            // ln τ ~ N(μ, s²); σ² ≤ q ⇔ ln τ ≥ −ln q, so P = Φ((ln q + μ)/s)
            let [(q1, a1), (q2, a2)] = vq.targets();
            let (z1, z2) = (std_normal_quantile(a1), std_normal_quantile(a2));
            let sdlog = (q2.ln() - q1.ln()) / (z2 - z1);
            let meanlog = z1 * sdlog - q1.ln();
            let distribution = PrecisionFamily::LogNormalPrecision(LogNormalParams::new(meanlog, sdlog)?);
            Ok(VariancePrior {
                residual: objective(&distribution, vq),
                distribution,
                fitted_to: *vq,
            })
        }
        PrecisionFamilyTag::InverseGamma | PrecisionFamilyTag::GammaPrecision => {
            let ig = fit_inverse_gamma(vq)?;
            let distribution = if family == PrecisionFamilyTag::InverseGamma {
                PrecisionFamily::InverseGamma(ig)
            } else {
                PrecisionFamily::GammaPrecision(GammaParams {
                    shape: ig.shape,
                    rate: ig.scale,
                })
            };
            Ok(VariancePrior {
                residual: objective(&distribution, vq),
                distribution,
                fitted_to: *vq,
            })
        }
    }
}

fn objective(d: &PrecisionFamily, vq: &VarianceQuantiles) -> f64 {
    vq.targets()
        .iter()
        .map(|&(s, a)| (d.variance_cdf(s) - a).powi(2))
        .sum()
}

fn ig_at(u: &[f64]) -> InverseGammaParams {
    InverseGammaParams {
        shape: u[0].exp(),
        scale: u[1].exp(),
    }
}

fn residuals(u: &[f64], vq: &VarianceQuantiles) -> [f64; 2] {
    let ig = ig_at(u);
    let d = PrecisionFamily::InverseGamma(ig);
    let [(q1, a1), (q2, a2)] = vq.targets();
    [d.variance_cdf(q1) - a1, d.variance_cdf(q2) - a2]
}

// Start from ln σ² ~ N(μ, s²) through the two targets, then match the mean
// and variance of the precision 1/σ² with a gamma distribution.
fn moment_start(vq: &VarianceQuantiles) -> (f64, f64) {
    let [(q1, a1), (q2, a2)] = vq.targets();
    let (z1, z2) = (std_normal_quantile(a1), std_normal_quantile(a2));
    let s = (q2.ln() - q1.ln()) / (z2 - z1);
    let mu = q1.ln() - z1 * s;
    let shape = 1.0 / (s * s).exp_m1();
    let mean_precision = (-mu + 0.5 * s * s).exp();
    (shape, shape / mean_precision)
}

fn fit_inverse_gamma(vq: &VarianceQuantiles) -> Result<InverseGammaParams> {
    let (a0, b0) = moment_start(vq);
    let failure = |message: String, u: &[f64], residual: f64| ElicitError::FitFailure {
        message,
        params: vec![u[0].exp(), u[1].exp()],
        residual,
    };
    if !(a0.is_finite() && b0.is_finite()) || a0 > MAX_SHAPE {
        let u = [a0.ln(), b0.ln()];
        return Err(failure(
            format!("variance quantiles too close together: shape would exceed {MAX_SHAPE:e}"),
            &u,
            f64::NAN,
        ));
    }

    let f = |u: &[f64]| {
        if u[0] > (4.0 * MAX_SHAPE).ln() {
            return f64::INFINITY;
        }
        let r = residuals(u, vq);
        r[0] * r[0] + r[1] * r[1]
    };
    let opts = SimplexOptions {
        x_tol: 1e-10,
        ..SimplexOptions::default()
    };
    let r = minimize(f, &[a0.ln(), b0.ln()], &[0.2, 0.2], opts);
    let u = newton_polish(r.x.clone(), vq);
    let fx = f(&u);
    let ig = ig_at(&u);
    if ig.shape > MAX_SHAPE {
        return Err(failure(format!("shape exceeds the cap {MAX_SHAPE:e}"), &u, fx));
    }
    if !(fx <= OBJECTIVE_TOL) || ig.validate().is_err() {
        return Err(failure(
            format!(
                "objective {fx:e} above tolerance {OBJECTIVE_TOL:e} after {} iterations",
                r.iterations
            ),
            &u,
            fx,
        ));
    }
    Ok(ig)
}

// Newton on the 2×2 system F(qᵢ) = levelᵢ in (log a, log b), with a
// finite-difference Jacobian and step halving. Only ever improves.
fn newton_polish(mut u: Vec<f64>, vq: &VarianceQuantiles) -> Vec<f64> {
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());
    let mut r = residuals(&u, vq);
    for _ in 0..30 {
        if norm(r) < 1e-15 {
            break;
        }
        let h = 1e-6;
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let mut up = u.clone();
            let mut dn = u.clone();
            up[j] += h;
            dn[j] -= h;
            let (rp, rm) = (residuals(&up, vq), residuals(&dn, vq));
            for i in 0..2 {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !(det.abs() > 0.0) || !det.is_finite() {
            break;
        }
        let d0 = (jac[1][1] * r[0] - jac[0][1] * r[1]) / det;
        let d1 = (jac[0][0] * r[1] - jac[1][0] * r[0]) / det;
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-4 {
            let cand = vec![u[0] - t * d0, u[1] - t * d1];
            let rc = residuals(&cand, vq);
            if norm(rc) < norm(r) {
                u = cand;
                r = rc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    u
}
