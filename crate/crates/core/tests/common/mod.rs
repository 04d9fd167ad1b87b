//! Independent reference computations for the integration tests.
//!
//! Nothing here calls into the crate's numerics; each oracle is a slow
//! brute-force route (series, quadrature, bisection, grid search).

#![allow(dead_code)]

use std::f64::consts::PI;

/// erf via the all-positive series erf(x) = 2/√π · e^{−x²} Σ 2ⁿ x^{2n+1} / (2n+1)!!.
pub fn erf_series(x: f64) -> f64 {
    let sign = x.signum();
    let x = x.abs();
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term > 1e-30 * sum {
        n += 1.0;
        term *= 2.0 * x * x / (2.0 * n + 1.0);
        sum += term;
    }
    sign * 2.0 / PI.sqrt() * (-x * x).exp() * sum
}

pub fn phi(z: f64) -> f64 {
    0.5 + 0.5 * erf_series(z / 2f64.sqrt())
}

/// Bisection on an increasing function.
pub fn bisect<F: Fn(f64) -> f64>(f: F, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * mid.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn phi_inv(p: f64) -> f64 {
    bisect(phi, p, -40.0, 40.0)
}

/// Nodes and weights of n-point Gauss–Legendre on [−1, 1] (Newton on Pₙ).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite 20-point Gauss–Legendre quadrature of `f` over [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let rule = gauss_legendre(20);
    let panels = 400;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            rule.iter()
                .map(|&(x, w)| w * f(mid + 0.5 * h * x))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

/// Regularized lower incomplete gamma P(a, x) as a ratio of two quadratures of
/// the (rescaled) gamma density. For a < 1 the substitution t = s¹⁰ removes
/// the endpoint singularity.
pub fn gamma_p_quadrature(a: f64, x: f64) -> f64 {
    if a < 1.0 {
        let g = |s: f64| 10.0 * s.powf(10.0 * a - 1.0) * (-(s.powi(10))).exp();
        let upper = 80f64.powf(0.1);
        let total = integrate(g, 0.0, upper);
        let part = integrate(g, 0.0, x.powf(0.1).min(upper));
        return part / total;
    }
    let mode = a - 1.0;
    let c = if a > 1.0 { mode * mode.ln() - mode } else { 0.0 };
    let g = |t: f64| {
        if t <= 0.0 {
            return if a == 1.0 { 1.0 } else { 0.0 };
        }
        ((a - 1.0) * t.ln() - t - c).exp()
    };
    let upper = a + 40.0 * a.sqrt() + 60.0;
    let total = integrate(g, 0.0, upper);
    let part = integrate(g, 0.0, x.min(upper));
    part / total
}

/// CDF of IG(a, b) by quadrature of its density, normalised by quadrature.
pub fn invgamma_cdf_quadrature(a: f64, b: f64, x: f64) -> f64 {
    // σ² ≤ x  ⇔  b/σ² ≥ b/x
    1.0 - gamma_p_quadrature(a, b / x)
}

/// Least squares Σ (F(vᵢ) − αᵢ)² minimised over a two-parameter grid, refined
/// by repeated zooming. Returns (p1, p2, objective).
pub fn grid_search<F: Fn(f64, f64) -> f64>(
    objective: F,
    mut range1: (f64, f64),
    mut range2: (f64, f64),
    zooms: usize,
) -> (f64, f64, f64) {
    let n = 60;
    let mut best = (f64::NAN, f64::NAN, f64::INFINITY);
    for _ in 0..zooms {
        for i in 0..=n {
            for j in 0..=n {
                let p1 = range1.0 + (range1.1 - range1.0) * i as f64 / n as f64;
                let p2 = range2.0 + (range2.1 - range2.0) * j as f64 / n as f64;
                let v = objective(p1, p2);
                if v < best.2 {
                    best = (p1, p2, v);
                }
            }
        }
        let w1 = (range1.1 - range1.0) / n as f64 * 2.0;
        let w2 = (range2.1 - range2.0) / n as f64 * 2.0;
        range1 = (best.0 - w1, best.0 + w1);
        range2 = (best.1 - w2, best.1 + w2);
    }
    best
}

/// Empirical quantile, type 7 (linear interpolation of order statistics),
/// of an already sorted slice.
pub fn type7(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Composite 20-point Gauss–Legendre with a chosen panel count.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gauss_legendre(20);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * h;
            rule.iter()
                .map(|&(x, w)| w * f(mid + 0.5 * h * x))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

/// CDF of Beta(a, b) on [0, 1] by quadrature of the unnormalised density
/// (a, b ≥ 1 so the integrand is bounded).
pub fn beta_cdf_quadrature(a: f64, b: f64, x: f64) -> f64 {
    let g = |t: f64| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0);
    integrate_panels(g, 0.0, x, 20) / integrate_panels(g, 0.0, 1.0, 20)
}

/// Independent sampler: SplitMix64 uniforms, Box–Muller normals and
/// Marsaglia–Tsang gammas. Shares nothing with the crate's generator.
pub struct OracleRng(u64);

impl OracleRng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform on (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    pub fn normal(&mut self) -> f64 {
        let (u, v) = (self.uniform(), self.uniform());
        (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
    }

    pub fn gamma(&mut self, a: f64) -> f64 {
        if a < 1.0 {
            return self.gamma(a + 1.0) * self.uniform().powf(1.0 / a);
        }
        let d = a - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let z = self.normal();
            let v = (1.0 + c * z).powi(3);
            if v <= 0.0 {
                continue;
            }
            let u = self.uniform();
            if u.ln() < 0.5 * z * z + d - d * v + d * v.ln() {
                return d * v;
            }
        }
    }

    pub fn inverse_gamma(&mut self, a: f64, b: f64) -> f64 {
        b / self.gamma(a)
    }
}
